"""Epoch-mixing policies: EpochUCB and EpochGreedy."""

import math

import numpy as np

from ..bounds import GreedyConfig, epsilon_k
from ..exceptions import UninitializedArm
from ..schedule import EpochSchedule, epoch_length
from .base import BanditPolicy, argmax_lowest


def confidence_window(k, T_j, L_value):
    """``L_j(T_j) / T_j + sqrt(6 ln k / T_j)``."""
    if k < 1 or T_j < 1:
        raise ValueError("k and T_j must be >= 1")
    return L_value / T_j + math.sqrt(6.0 * math.log(k) / T_j)


def epochucb_select(k, stats, L):
    """Arm maximising mean reward plus confidence window.

    Parameters
    ----------
    k : int
        Current epoch index (1-based).
    stats : sequence of ArmStats
    L : callable
        ``L(j, T)`` returns the mixing penalty of arm ``j`` after ``T`` pulls.
    """
    scores = np.empty(len(stats))
    for j, s in enumerate(stats):
        if s.pulls == 0:
            raise UninitializedArm(f"arm {j} has never been pulled")
        scores[j] = s.mean_reward + confidence_window(k, s.pulls, L(j, s.pulls))
    return argmax_lowest(scores)


def epochgreedy_select(k, stats, config, rng):
    """Exploit the best mean w.p. ``1 - epsilon_k``, otherwise pick an arm uniformly.

    Exactly one uniform draw decides the branch; exploration draws one
    more integer, so replays are reproducible.
    """
    m = len(stats)
    if rng.random() < epsilon_k(config, m, k):
        return int(rng.integers(m))
    return argmax_lowest([s.mean_reward for s in stats])


def _zero_L(j, T):
    return 0.0


class EpochPolicy(BanditPolicy):
    granularity = "epoch"

    def epoch_length(self, arm):
        return epoch_length(self.schedule, int(self.pulls_[arm]))


class EpochUCB(EpochPolicy):
    """UCB over epochs whose confidence window also absorbs the mixing penalty.

    Parameters
    ----------
    schedule : EpochSchedule
    bound : BoundInputs, optional
        Supplies ``L_j(T)``.  The harness fills this in from the true
        chain statistics; without it the window has no mixing term.
    """

    def __init__(self, schedule=EpochSchedule(), bound=None):
        self.schedule = schedule
        self.bound = bound

    def reset(self, n_arms, random_state=None):
        super().reset(n_arms, random_state)
        self._L_cache = {}
        return self

    def _L(self, j, T):
        if self.bound is None:
            return 0.0
        key = (j, T)
        if key not in self._L_cache:
            self._L_cache[key] = self.bound.L(j, T)
        return self._L_cache[key]

    def select(self, k, **_):
        # initialization round: each arm once, epoch length tau0
        if k <= self.n_arms_:
            return k - 1
        return epochucb_select(k, self.stats_, self._L)


class EpochGreedy(EpochPolicy):
    """Epsilon-greedy over epochs with ``epsilon_k = min(1, c m / (d^2 k))``.

    Untried arms count as mean 0 and there is no initialization round.
    """

    def __init__(self, schedule=EpochSchedule(), config=None):
        self.schedule = schedule
        self.config = config

    def reset(self, n_arms, random_state=None):
        if self.config is None:
            raise ValueError("EpochGreedy needs a GreedyConfig")
        return super().reset(n_arms, random_state)

    def select(self, k, **_):
        return epochgreedy_select(k, self.stats_, self.config, self.rng_)


__all__ = ["EpochUCB", "EpochGreedy", "GreedyConfig", "confidence_window",
           "epochucb_select", "epochgreedy_select", "epoch_length"]
