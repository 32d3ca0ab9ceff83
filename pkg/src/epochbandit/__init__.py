"""Epoch-mixing bandits in correlated Markovian environments."""

from .bounds import BoundInputs, GreedyConfig
from .chain import (ChainStats, chain_stats, check_assumptions, evolve, fill_bound, lambda2_M,
                    multiplicative_reversiblization, stationary_distribution, time_reversal)
from .environment import (Bernoulli, Beta, EpochOutcome, ProblemInstance, Uniform,
                          expected_smoothed_reward, gaps, mu, pull_arm)
from .instances import GeneratorSpec, example1, generate, penalty_example, sample_random_transition
from .policies import EXP3, UCB1, EpochGreedy, EpochUCB, EpsilonGreedy, LinearQ, UCBTuned
from .schedule import EpochSchedule

__version__ = "0.1.0"

__all__ = [
    "BoundInputs", "GreedyConfig", "ChainStats", "chain_stats", "check_assumptions", "evolve",
    "fill_bound", "lambda2_M", "multiplicative_reversiblization", "stationary_distribution",
    "time_reversal", "Bernoulli", "Beta", "Uniform", "EpochOutcome", "ProblemInstance",
    "expected_smoothed_reward", "gaps", "mu", "pull_arm", "GeneratorSpec", "example1", "generate",
    "penalty_example", "sample_random_transition", "EXP3", "UCB1", "EpochGreedy", "EpochUCB",
    "EpsilonGreedy", "LinearQ", "UCBTuned", "EpochSchedule",
]
