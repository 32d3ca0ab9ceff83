"""Shared policy machinery."""

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator

from ..utils import check_random_state


@dataclass(frozen=True)
class ArmStats:
    """Pull count and running mean of one arm's observed rewards."""

    pulls: int = 0
    mean_reward: float = 0.0
    second_moment: float = 0.0

    @property
    def variance(self):
        return max(0.0, self.second_moment - self.mean_reward ** 2)


def update_mean(stats, new_reward):
    """Fold one reward into ``stats`` as an exact arithmetic mean (divisor ``T + 1``)."""
    n = stats.pulls + 1
    mean = stats.mean_reward + (new_reward - stats.mean_reward) / n
    second = stats.second_moment + (new_reward * new_reward - stats.second_moment) / n
    return ArmStats(n, mean, second)


def argmax_lowest(values):
    """Index of the maximum, lowest index on ties."""
    return int(np.argmax(values))


class BanditPolicy(BaseEstimator):
    """Base class: hyperparameters in ``__init__``, run state in trailing-underscore attributes.

    Subclasses implement ``select`` and ``update``.  ``reset`` must be
    called before a run; it takes the arm count and a random source.
    ``granularity`` is ``"epoch"`` for policies that commit to an arm for
    a whole epoch, ``"iteration"`` for classic per-round policies.
    """

    granularity = "iteration"
    uses_state = False

    def reset(self, n_arms, random_state=None):
        if n_arms < 1:
            raise ValueError("need at least one arm")
        self.n_arms_ = int(n_arms)
        self.rng_ = check_random_state(random_state)
        self.pulls_ = np.zeros(self.n_arms_, dtype=np.int64)
        self.means_ = np.zeros(self.n_arms_)
        self.second_ = np.zeros(self.n_arms_)
        return self

    @property
    def stats_(self):
        return [ArmStats(int(n), float(mu), float(s2))
                for n, mu, s2 in zip(self.pulls_, self.means_, self.second_)]

    def update(self, arm, reward, **_):
        # same arithmetic as update_mean, on the array representation
        n = self.pulls_[arm] + 1
        self.means_[arm] += (reward - self.means_[arm]) / n
        self.second_[arm] += (reward * reward - self.second_[arm]) / n
        self.pulls_[arm] = n

    def predict(self):
        """Arm with the best empirical mean so far."""
        return argmax_lowest(self.means_)

    def fit(self, instance, horizon, random_state=None, **run_kwargs):
        """Play ``horizon`` epochs (or iterations) against ``instance``; keeps ``trace_``."""
        from ..harness import run_policy
        self.trace_ = run_policy(self, instance, horizon, random_state=random_state, **run_kwargs)
        return self
