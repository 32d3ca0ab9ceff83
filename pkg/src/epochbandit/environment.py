"""Correlated Markovian bandit environment.

All arms share one unobserved state whose distribution ``beta`` evolves
with the transition matrix of whichever arm is being pulled.  An epoch
of ``tau`` iterations returns a single discount-averaged (``gamma < 1``)
or time-averaged (``gamma = 1``) reward.
"""

from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np

from ._tolerances import TOL
from .chain import ChainStats, check_assumptions, chain_stats, distribution_path, stationary_distribution
from .exceptions import InvalidArm, InvalidTau, NonErgodicChain, SpectralAssumptionViolated
from .utils.validation import check_distribution, check_gamma, check_transition_matrix


# ---------------------------------------------------------------------------
# reward kernels

class RewardKernel:
    """Reward distribution supported on [0, 1]."""

    kind = None

    def mean(self):
        raise NotImplementedError

    def sample(self, rng, size=None):
        raise NotImplementedError

    def params(self):
        raise NotImplementedError

    def to_dict(self):
        return {"type": self.kind, "params": self.params()}

    @staticmethod
    def from_dict(d):
        cls = _KERNELS.get(d["type"])
        if cls is None:
            raise ValueError(f"unknown kernel type {d['type']!r}")
        return cls(**d["params"])


@dataclass(frozen=True)
class Bernoulli(RewardKernel):
    p: float
    kind = "bernoulli"

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"Bernoulli p must lie in [0, 1], got {self.p}")

    def mean(self):
        return float(self.p)

    def sample(self, rng, size=None):
        return (rng.random(size) < self.p).astype(float)

    def params(self):
        return {"p": self.p}


@dataclass(frozen=True)
class Beta(RewardKernel):
    """Beta(a, b) drawn as ``X / (X + Y)`` with ``X ~ Gamma(a)``, ``Y ~ Gamma(b)``."""

    a: float
    b: float
    kind = "beta"

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0):
            raise ValueError("Beta parameters must be positive")

    def mean(self):
        return self.a / (self.a + self.b)

    def sample(self, rng, size=None):
        x = rng.standard_gamma(self.a, size)
        y = rng.standard_gamma(self.b, size)
        total = x + y
        # both gammas underflow for tiny shapes; fall back to the mean
        return np.where(total > 0, x / np.where(total > 0, total, 1.0), self.mean())

    def params(self):
        return {"a": self.a, "b": self.b}


@dataclass(frozen=True)
class Uniform(RewardKernel):
    """Uniform on ``[lo, hi]``; ``lo == hi`` is a point mass (a deterministic reward)."""

    lo: float
    hi: float
    kind = "uniform"

    def __post_init__(self):
        if not 0.0 <= self.lo <= self.hi <= 1.0:
            raise ValueError("Uniform bounds must satisfy 0 <= lo <= hi <= 1")

    def mean(self):
        return 0.5 * (self.lo + self.hi)

    def sample(self, rng, size=None):
        return self.lo + (self.hi - self.lo) * rng.random(size)

    def params(self):
        return {"lo": self.lo, "hi": self.hi}


_KERNELS = {cls.kind: cls for cls in (Bernoulli, Beta, Uniform)}


# ---------------------------------------------------------------------------
# problem instance

@dataclass(frozen=True, eq=False)
class ProblemInstance:
    """``m`` arms sharing a finite state space.

    Parameters
    ----------
    P : sequence of (S, S) arrays
        One transition matrix per arm.
    kernels : sequence of sequences of RewardKernel
        ``kernels[j][s]`` is the reward distribution of arm ``j`` in state ``s``.
    beta1 : (S,) array
        Initial state distribution.
    gamma : float
        Discount factor in (0, 1]; 1 means time-averaged feedback.
    """

    P: tuple
    kernels: tuple
    beta1: np.ndarray
    gamma: float = 1.0
    name: str = ""
    validate: bool = field(default=True, repr=False)

    def __post_init__(self):
        Ps = tuple(check_transition_matrix(p, name=f"P[{j}]") for j, p in enumerate(self.P))
        if not Ps:
            raise ValueError("instance needs at least one arm")
        n_states = Ps[0].shape[0]
        if any(p.shape[0] != n_states for p in Ps):
            raise ValueError("all transition matrices must share one state space")
        kernels = tuple(tuple(row) for row in self.kernels)
        if len(kernels) != len(Ps) or any(len(row) != n_states for row in kernels):
            raise ValueError("kernels must be an m x |states| table")
        object.__setattr__(self, "P", Ps)
        object.__setattr__(self, "kernels", kernels)
        object.__setattr__(self, "beta1", check_distribution(self.beta1, n_states, name="beta1"))
        object.__setattr__(self, "gamma", check_gamma(self.gamma))
        if self.validate:
            for j, p in enumerate(Ps):
                report = check_assumptions(p)
                if not report.ergodic:
                    raise NonErgodicChain(f"arm {j}: {report}")
                if not report.M_irreducible:
                    raise SpectralAssumptionViolated(f"arm {j}: M(P) is not irreducible")

    @property
    def m(self):
        return len(self.P)

    @property
    def n_states(self):
        return self.P[0].shape[0]

    @cached_property
    def kernel_means(self):
        means = np.array([[k.mean() for k in row] for row in self.kernels])
        means.setflags(write=False)
        return means

    @cached_property
    def stationary(self):
        return tuple(stationary_distribution(p) for p in self.P)

    @cached_property
    def mus(self):
        return np.array([float(pi @ self.kernel_means[j]) for j, pi in enumerate(self.stationary)])

    @cached_property
    def optimal_arm(self):
        return int(np.argmax(self.mus))

    @property
    def has_unique_optimum(self):
        mus = self.mus
        return int(np.sum(mus >= mus.max() - 1e-12)) == 1

    @property
    def mu_star(self):
        return float(self.mus.max())

    def stats(self, gamma=None):
        """Per-arm :class:`ChainStats` at ``gamma`` (defaults to the instance's)."""
        g = self.gamma if gamma is None else gamma
        cache = self.__dict__.setdefault("_stats_cache", {})
        if g not in cache:
            cache[g] = tuple(chain_stats(p, g) for p in self.P)
        return cache[g]

    def with_gamma(self, gamma):
        return replace(self, gamma=gamma, validate=False)

    def with_beta1(self, beta1):
        return replace(self, beta1=beta1, validate=False)


def mu(instance, arm):
    """Expected stationary reward ``sum_s pi_arm(s) * mean(kernel(arm, s))``."""
    _check_arm(instance, arm)
    return float(instance.mus[arm])


def gaps(instance):
    """Reward gaps ``mu* - mu_j``; zero for the optimal arm."""
    return instance.mu_star - instance.mus


# ---------------------------------------------------------------------------
# epochs

@dataclass(frozen=True)
class EpochOutcome:
    smoothed_reward: float
    discount_mass: float
    final_beta: np.ndarray
    iterations: int


def discount_mass(gamma, tau):
    """Closed-form sum of discount factors over an epoch of ``tau`` iterations."""
    if gamma == 1.0:
        return float(tau)
    return (1.0 - gamma ** tau) / (1.0 - gamma)


def discount_weights(gamma, tau):
    """``gamma^(tau-1-t)`` for ``t = 0..tau-1``."""
    if gamma == 1.0:
        return np.ones(tau)
    return gamma ** np.arange(tau - 1, -1, -1, dtype=float)


def _check_arm(instance, arm):
    if not (0 <= int(arm) < instance.m) or isinstance(arm, bool):
        raise InvalidArm(f"arm {arm!r} outside [0, {instance.m})")


def _check_tau(tau):
    if isinstance(tau, bool) or int(tau) != tau or tau < 1:
        raise InvalidTau(f"tau must be a positive integer, got {tau!r}")
    return int(tau)


def _sample_rewards(instance, arm, states, rng):
    rewards = np.empty(states.size)
    row = instance.kernels[arm]
    for s in range(instance.n_states):
        mask = states == s
        count = int(mask.sum())
        if count:
            rewards[mask] = row[s].sample(rng, count)
    return rewards


def pull_arm(instance, arm, beta, tau, rng, *, gamma=None, mode="distribution"):
    """Play ``arm`` for one epoch of ``tau`` iterations.

    In ``"distribution"`` mode each iteration draws its state afresh from
    the current distribution ``beta_t`` and the distribution advances by
    one full matrix product, exactly as the environment is specified.
    ``"trajectory"`` mode instead follows a single sampled path, and the
    returned ``final_beta`` is a point mass on the next state.
    """
    _check_arm(instance, arm)
    tau = _check_tau(tau)
    gamma = instance.gamma if gamma is None else check_gamma(gamma)
    beta = np.asarray(beta, dtype=float)
    P = instance.P[arm]
    n = instance.n_states
    if mode == "distribution":
        path = distribution_path(beta, P, tau)
        cum = np.cumsum(path[:-1], axis=1)
        u = rng.random(tau)
        states = np.minimum((u[:, None] >= cum).sum(axis=1), n - 1)
        final = path[-1]
    elif mode == "trajectory":
        cum_rows = np.cumsum(P, axis=1)
        states = np.empty(tau, dtype=np.intp)
        u = rng.random(tau + 1)
        s = min(int(np.searchsorted(np.cumsum(beta), u[0], side="right")), n - 1)
        for t in range(tau):
            states[t] = s
            s = min(int(np.searchsorted(cum_rows[s], u[t + 1], side="right")), n - 1)
        final = np.zeros(n)
        final[s] = 1.0
    else:
        raise ValueError(f"unknown mode {mode!r}")
    rewards = _sample_rewards(instance, arm, states, rng)
    weights = discount_weights(gamma, tau)
    mass = discount_mass(gamma, tau)
    accumulated = weights.sum()
    if abs(accumulated - mass) > TOL.discount_mass * max(1.0, mass):
        raise AssertionError(f"discount mass drift: {accumulated} vs {mass}")
    reward = float(weights @ rewards) / mass
    s = final.sum()
    if abs(s - 1.0) > TOL.renormalize:
        final = final / s
    return EpochOutcome(min(max(reward, 0.0), 1.0), mass, final, tau)


def expected_smoothed_reward(instance, arm, beta, tau, gamma=None):
    """Exact ``E[smoothed reward | beta]`` by deterministic propagation."""
    _check_arm(instance, arm)
    tau = _check_tau(tau)
    gamma = instance.gamma if gamma is None else check_gamma(gamma)
    path = distribution_path(np.asarray(beta, dtype=float), instance.P[arm], tau - 1)
    per_step = path @ instance.kernel_means[arm]
    return float(discount_weights(gamma, tau) @ per_step) / discount_mass(gamma, tau)


class MarkovBanditEnv:
    """Stateful wrapper that carries the state distribution across epochs.

    Parameters
    ----------
    instance : ProblemInstance
    rng : numpy.random.Generator
    mode : {"distribution", "trajectory"}
    """

    def __init__(self, instance, rng, mode="distribution"):
        self.instance = instance
        self.rng = rng
        self.mode = mode
        self.reset()

    def reset(self):
        self.beta = np.array(self.instance.beta1, dtype=float)
        self.t = 0
        if self.mode == "trajectory":
            n = self.instance.n_states
            s = min(int(np.searchsorted(np.cumsum(self.beta), self.rng.random(), side="right")), n - 1)
            self.beta = np.zeros(n)
            self.beta[s] = 1.0

    def pull(self, arm, tau):
        out = pull_arm(self.instance, arm, self.beta, tau, self.rng, mode=self.mode)
        self.beta = out.final_beta
        self.t += tau
        return out
