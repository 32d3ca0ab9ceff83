"""Bandit policies for correlated Markovian environments."""

from ..bounds import GreedyConfig, epsilon_k, kappa
from ..schedule import EpochSchedule, epoch_length
from .base import ArmStats, BanditPolicy, argmax_lowest, update_mean
from .baselines import (EXP3, UCB1, EpsilonGreedy, LinearQ, UCBTuned, eps_greedy_select,
                        exp3_gamma, exp3_probabilities, exp3_step, linq_features, linq_step,
                        td_loss, ucb1_select, ucb_tuned_select)
from .epoch import EpochGreedy, EpochUCB, confidence_window, epochgreedy_select, epochucb_select

POLICIES = {
    "epochucb": EpochUCB,
    "epochgreedy": EpochGreedy,
    "ucb1": UCB1,
    "ucb_tuned": UCBTuned,
    "eps_greedy": EpsilonGreedy,
    "exp3": EXP3,
    "linq": LinearQ,
}

__all__ = [
    "ArmStats", "BanditPolicy", "argmax_lowest", "EpochSchedule", "GreedyConfig", "POLICIES",
    "EpochUCB", "EpochGreedy", "UCB1", "UCBTuned", "EpsilonGreedy", "EXP3", "LinearQ",
    "confidence_window", "epoch_length", "epsilon_k", "kappa", "update_mean",
    "epochucb_select", "epochgreedy_select", "ucb1_select", "ucb_tuned_select",
    "eps_greedy_select", "exp3_gamma", "exp3_probabilities", "exp3_step",
    "linq_features", "linq_step", "td_loss",
]
