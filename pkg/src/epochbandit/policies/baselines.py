"""Per-iteration comparison policies.

These act once per iteration and see the instantaneous reward, which
is how they are usually deployed.  In a correlated Markovian
environment that makes them chase transient rewards.
"""

import math

import numpy as np

from .base import BanditPolicy, argmax_lowest


def ucb1_select(t, stats):
    """Untried arms first, then ``mean + sqrt(2 ln t / T_j)``."""
    pulls = np.array([s.pulls for s in stats])
    untried = np.flatnonzero(pulls == 0)
    if untried.size:
        return int(untried[0])
    means = np.array([s.mean_reward for s in stats])
    return argmax_lowest(means + np.sqrt(2.0 * math.log(t) / pulls))


def ucb_tuned_select(t, stats):
    """UCB1-Tuned: the exploration radius uses ``min(1/4, V_j)`` with ``V_j`` a variance upper bound."""
    pulls = np.array([s.pulls for s in stats])
    untried = np.flatnonzero(pulls == 0)
    if untried.size:
        return int(untried[0])
    means = np.array([s.mean_reward for s in stats])
    var = np.array([s.variance for s in stats])
    log_t = math.log(t)
    V = var + np.sqrt(2.0 * log_t / pulls)
    return argmax_lowest(means + np.sqrt(log_t / pulls * np.minimum(0.25, V)))


def eps_greedy_select(t, stats, c, d, m, rng):
    untried = [j for j, s in enumerate(stats) if s.pulls == 0]
    if untried:
        return untried[0]
    eps = min(1.0, c * m / (d * d * t))
    if rng.random() < eps:
        return int(rng.integers(m))
    return argmax_lowest([s.mean_reward for s in stats])


def exp3_probabilities(log_weights, gamma):
    """Mixture of the exponential-weights distribution and the uniform one."""
    w = np.exp(log_weights - log_weights.max())
    m = log_weights.size
    p = (1.0 - gamma) * w / w.sum() + gamma / m
    return p / p.sum()


def exp3_step(log_weights, arm_drawn, reward, gamma, probs=None):
    """Importance-weighted exponential update; returns new log-weights.

    Weights are kept in log space and shifted so the largest is 0.  Any
    log-weight more than 700 below the maximum is floored there, which
    keeps every weight strictly positive in double precision; such an arm
    is already selected only through the uniform mixing term.
    """
    m = log_weights.size
    if probs is None:
        probs = exp3_probabilities(log_weights, gamma)
    out = np.array(log_weights, dtype=float)
    out[arm_drawn] += gamma * (reward / probs[arm_drawn]) / m
    out -= out.max()
    return np.maximum(out, -700.0)


def exp3_gamma(m, horizon):
    if m < 2:
        return 1.0
    return min(1.0, math.sqrt(m * math.log(m) / ((math.e - 1.0) * horizon)))


class UCB1(BanditPolicy):
    """Classic UCB1 index policy."""

    def __init__(self):
        pass

    def select(self, t, **_):
        untried = np.flatnonzero(self.pulls_ == 0)
        if untried.size:
            return int(untried[0])
        return argmax_lowest(self.means_ + np.sqrt(2.0 * math.log(t) / self.pulls_))


class UCBTuned(BanditPolicy):
    """UCB with a variance-tuned window (``UCB+``)."""

    def __init__(self):
        pass

    def select(self, t, **_):
        untried = np.flatnonzero(self.pulls_ == 0)
        if untried.size:
            return int(untried[0])
        log_t = math.log(t)
        var = np.maximum(0.0, self.second_ - self.means_ ** 2)
        V = var + np.sqrt(2.0 * log_t / self.pulls_)
        return argmax_lowest(self.means_ + np.sqrt(log_t / self.pulls_ * np.minimum(0.25, V)))


class EpsilonGreedy(BanditPolicy):
    """Epsilon-greedy with ``epsilon_t = min(1, c m / (d^2 t))``.

    Like UCB1, every arm is tried once before the rule applies.

    Parameters
    ----------
    c : float
    d : float or None
        Gap lower bound; the harness substitutes the true smallest gap when None.
    """

    def __init__(self, c=1.0, d=None):
        self.c = c
        self.d = d

    def select(self, t, **_):
        untried = np.flatnonzero(self.pulls_ == 0)
        if untried.size:
            return int(untried[0])
        d = 1.0 if self.d is None else self.d
        eps = min(1.0, self.c * self.n_arms_ / (d * d * t))
        if self.rng_.random() < eps:
            return int(self.rng_.integers(self.n_arms_))
        return argmax_lowest(self.means_)


class EXP3(BanditPolicy):
    """EXP3 with mixing ``gamma = min(1, sqrt(m ln m / ((e - 1) horizon)))`` unless given."""

    def __init__(self, gamma=None, horizon=None):
        self.gamma = gamma
        self.horizon = horizon

    def reset(self, n_arms, random_state=None):
        super().reset(n_arms, random_state)
        self.log_weights_ = np.zeros(self.n_arms_)
        if self.gamma is not None:
            self.gamma_ = float(self.gamma)
        elif self.horizon is not None:
            self.gamma_ = exp3_gamma(self.n_arms_, self.horizon)
        else:
            raise ValueError("EXP3 needs gamma or horizon")
        self.probs_ = exp3_probabilities(self.log_weights_, self.gamma_)
        return self

    def select(self, t, **_):
        u = self.rng_.random()
        arm = int(np.searchsorted(np.cumsum(self.probs_), u, side="right"))
        return min(arm, self.n_arms_ - 1)

    def update(self, arm, reward, **kw):
        super().update(arm, reward)
        self.log_weights_ = exp3_step(self.log_weights_, arm, reward, self.gamma_, self.probs_)
        self.probs_ = exp3_probabilities(self.log_weights_, self.gamma_)


def linq_features(beta, action, m):
    """Place ``beta`` in the block of coordinates reserved for ``action``."""
    S = beta.size
    phi = np.zeros(S * m)
    phi[action * S:(action + 1) * S] = beta
    return phi


def linq_q_values(w, beta, m):
    return w.reshape(m, -1) @ beta


def td_loss(w, beta, action, reward, next_beta, gamma_rl, target_w=None):
    """Half squared TD error with the bootstrap target computed from ``target_w`` (held fixed)."""
    m = w.size // beta.size
    tw = w if target_w is None else target_w
    target = reward + gamma_rl * linq_q_values(tw, next_beta, m).max()
    q = w @ linq_features(beta, action, m)
    return 0.5 * (target - q) ** 2


def linq_step(w, beta_observed, action, reward, k, next_beta=None, gamma_rl=0.9):
    """One semi-gradient Q-learning step with step size ``1/sqrt(k)``.

    Returns the new weight vector; ``w`` is not modified.
    """
    beta_observed = np.asarray(beta_observed, dtype=float)
    m = w.size // beta_observed.size
    phi = linq_features(beta_observed, action, m)
    target = reward
    if gamma_rl and next_beta is not None:
        target = reward + gamma_rl * linq_q_values(w, np.asarray(next_beta, float), m).max()
    td = target - w @ phi
    return w + (1.0 / math.sqrt(k)) * td * phi


class LinearQ(BanditPolicy):
    """Q-learning with linear features of the observed state distribution.

    Parameters
    ----------
    gamma_rl : float
        Discount of the bootstrap target.
    horizon : int
        Iteration budget; exploration ``eps_t = eps0 * decay^t`` is tuned
        so that it first drops below ``eps_half`` at ``horizon / 2``.
    eps0, eps_half : float
    """

    uses_state = True

    def __init__(self, gamma_rl=0.9, horizon=None, eps0=1.0, eps_half=0.04):
        self.gamma_rl = gamma_rl
        self.horizon = horizon
        self.eps0 = eps0
        self.eps_half = eps_half

    def reset(self, n_arms, random_state=None, n_states=None):
        super().reset(n_arms, random_state)
        if n_states is None or self.horizon is None:
            raise ValueError("LinearQ needs n_states and horizon")
        self.n_states_ = int(n_states)
        self.w_ = np.zeros(self.n_states_ * self.n_arms_)
        half = max(1.0, self.horizon / 2.0)
        self.log_decay_ = math.log(self.eps_half / self.eps0) / half
        return self

    def epsilon(self, t):
        return self.eps0 * math.exp(self.log_decay_ * t)

    def select(self, t, beta=None, **_):
        if self.rng_.random() < self.epsilon(t):
            return int(self.rng_.integers(self.n_arms_))
        return argmax_lowest(linq_q_values(self.w_, beta, self.n_arms_))

    def update(self, arm, reward, beta=None, next_beta=None, t=1, **_):
        super().update(arm, reward)
        self.w_ = linq_step(self.w_, beta, arm, reward, t, next_beta, self.gamma_rl)


__all__ = ["UCB1", "UCBTuned", "EpsilonGreedy", "EXP3", "LinearQ",
           "ucb1_select", "ucb_tuned_select", "eps_greedy_select",
           "exp3_probabilities", "exp3_step", "exp3_gamma",
           "linq_features", "linq_step", "td_loss"]
