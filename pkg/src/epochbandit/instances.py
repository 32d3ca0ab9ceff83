"""Canned instances, the anti-correlated random generator, and random chains."""

import math
from dataclasses import dataclass, field

import numpy as np

from .chain import check_assumptions, lambda2_M
from .environment import Bernoulli, Beta, ProblemInstance, Uniform
from .exceptions import EpochBanditError, GenerationExhausted
from .utils import check_random_state, mix64

KERNEL_TYPES = ("bernoulli", "beta", "uniform")


def example1(epsilon=0.01, gamma=1.0, noisy=False):
    """Two arms whose chains trap each other's good state.

    Arm 0 jumps to state 1 (reward 1) and leaves it with probability
    ``epsilon``; arm 1 is the mirror image but pays 0.5 in both states.
    Starting from state 0, per-iteration policies see arm 0 pay 0 and
    settle on arm 1, although arm 0's stationary reward is ``1/(1+eps)``.

    Rewards are deterministic.  ``noisy=True`` replaces arm 1's constant
    0.5 by a Bernoulli(0.5) draw with the same mean.
    """
    if not 0 < epsilon < 0.5:
        raise ValueError("epsilon must lie in (0, 0.5)")
    e = float(epsilon)
    P1 = [[0.0, 1.0], [e, 1.0 - e]]
    P2 = [[1.0 - e, e], [1.0, 0.0]]
    half = Bernoulli(0.5) if noisy else Uniform(0.5, 0.5)
    kernels = [[Bernoulli(0.0), Bernoulli(1.0)], [half, half]]
    tag = ",noisy" if noisy else ""
    return ProblemInstance((P1, P2), kernels, [1.0, 0.0], gamma, name=f"example1(eps={e!r}{tag})")


def penalty_example(epsilon=0.1, gamma=1.0):
    """Single arm with ``pi = (eps, 1 - eps)``, rewards ``(0, 1)``, started in the bad state.

    Regret of the first epoch is close to ``1 - eps`` although there is
    nothing to learn.
    """
    if not 0 < epsilon < 0.5:
        raise ValueError("epsilon must lie in (0, 0.5)")
    q = epsilon / (1.0 - epsilon)
    P = [[0.0, 1.0], [q, 1.0 - q]]
    return ProblemInstance((P,), [[Bernoulli(0.0), Bernoulli(1.0)]], [1.0, 0.0], gamma,
                           name=f"penalty(eps={epsilon!r})")


def example1_crossover(tol=1e-12):
    """Largest ``epsilon`` for which arm 0 of :func:`example1` stays optimal (bisection)."""
    lo, hi = 1e-9, 0.5 - 1e-9

    def margin(e):
        inst = example1(e)
        return inst.mus[0] - inst.mus[1]

    if margin(hi) > 0:
        return 0.5
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if margin(mid) > 0:
            lo = mid
        else:
            hi = mid
    return lo


# ---------------------------------------------------------------------------
# random generator

@dataclass(frozen=True)
class GeneratorSpec:
    """Parameters of the anti-correlated instance class.

    ``anti_correlation_mass`` is the probability mass every row of the
    optimal arm puts on its favored state subset; suboptimal arms put at
    most one minus that there.
    """

    m: int = 4
    states: int = 4
    seed: int = 0
    anti_correlation_mass: float = 0.9
    kernel_palette: tuple = KERNEL_TYPES
    gamma: float = 1.0
    max_retries: int = 100
    min_gap: float = 0.01
    extra: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.m < 2 or self.states < 2:
            raise ValueError("generator needs m >= 2 and states >= 2")
        if not 0 < self.anti_correlation_mass < 1:
            raise ValueError("anti_correlation_mass must lie in (0, 1)")
        bad = set(self.kernel_palette) - set(KERNEL_TYPES)
        if bad or not self.kernel_palette:
            raise ValueError(f"unknown kernel types {sorted(bad)}")

    def to_dict(self):
        return {"m": self.m, "states": self.states, "seed": self.seed,
                "anti_correlation_mass": self.anti_correlation_mass,
                "kernel_palette": list(self.kernel_palette), "gamma": self.gamma}


def _split_row(rng, inside, outside, mass_in, n):
    row = np.zeros(n)
    row[inside] = mass_in * rng.dirichlet(np.ones(inside.size))
    row[outside] = (1.0 - mass_in) * rng.dirichlet(np.ones(outside.size))
    return row


def _kernel(kind, mean, rng):
    if kind == "bernoulli":
        return Bernoulli(float(mean))
    if kind == "beta":
        conc = rng.uniform(2.0, 10.0)
        return Beta(float(mean * conc), float((1.0 - mean) * conc))
    half = min(mean, 1.0 - mean) * rng.uniform(0.2, 1.0)
    return Uniform(float(mean - half), float(mean + half))


def _attempt(spec, rng):
    S, m, a = spec.states, spec.m, spec.anti_correlation_mass
    favored = np.sort(rng.choice(S, size=math.ceil(S / 2), replace=False))
    rest = np.setdiff1d(np.arange(S), favored)
    best = int(rng.integers(m))
    Ps = []
    for j in range(m):
        if j == best:
            rows = [_split_row(rng, favored, rest, a, S) for _ in range(S)]
        else:
            rows = [_split_row(rng, favored, rest, rng.uniform(0.5, 1.0) * (1.0 - a), S)
                    for _ in range(S)]
        P = np.array(rows)
        P /= P.sum(axis=1, keepdims=True)
        Ps.append(P)
    # kernels: means increase with the arm's own stationary probabilities
    from .chain import stationary_distribution
    kernels = []
    for j in range(m):
        pi = stationary_distribution(Ps[j])
        means = np.sort(rng.uniform(0.02, 0.98, size=S))
        order = np.argsort(pi, kind="stable")
        row = [None] * S
        for rank, s in enumerate(order):
            kind = spec.kernel_palette[int(rng.integers(len(spec.kernel_palette)))]
            row[s] = _kernel(kind, means[rank], rng)
        kernels.append(row)
    beta1 = rng.dirichlet(np.ones(S))
    return best, ProblemInstance(tuple(Ps), kernels, beta1, spec.gamma)


def generate(spec):
    """Draw an instance from the anti-correlated class, retrying until it is valid.

    Attempt ``i`` uses the stream ``mix64(seed, i)``, so the result is a
    deterministic function of ``spec``.

    Raises
    ------
    GenerationExhausted
        If no attempt within ``spec.max_retries`` passes every check.
    """
    for attempt in range(spec.max_retries):
        rng = np.random.default_rng(mix64(spec.seed, attempt))
        try:
            best, inst = _attempt(spec, rng)
        except EpochBanditError:
            continue
        mus = inst.mus
        if int(np.argmax(mus)) != best or not inst.has_unique_optimum:
            continue
        others = np.delete(mus, best)
        if mus[best] - others.max() < spec.min_gap:
            continue
        object.__setattr__(inst, "name", f"generated(m={spec.m},S={spec.states},seed={spec.seed})")
        return inst
    raise GenerationExhausted(f"no valid instance after {spec.max_retries} attempts")


# ---------------------------------------------------------------------------
# random transition matrices

def sample_random_transition(dist, states, seed=None):
    """Random row-stochastic matrix.

    ``"uniform"`` draws i.i.d. U(0, 1) entries; ``"absnormal"`` draws
    ``|N(0, 1)|`` entries.  Rows are then normalized to sum to one.
    """
    rng = check_random_state(seed)
    if dist == "uniform":
        X = rng.random((states, states))
    elif dist == "absnormal":
        X = np.abs(rng.standard_normal((states, states)))
    else:
        raise ValueError(f"unknown distribution {dist!r}")
    return X / X.sum(axis=1, keepdims=True)


def spectrum_samples(dist, states=10, samples=1000, seed=0):
    """``lambda_2(M(P))`` for ``samples`` independent random chains from one seeded stream."""
    rng = check_random_state(seed)
    out = np.empty(samples)
    for i in range(samples):
        P = sample_random_transition(dist, states, rng)
        out[i] = lambda2_M(P)
    return out


def random_ergodic_chain(states, rng, sparsity=0.0):
    """Random ergodic chain, optionally with some entries zeroed (kept only if still ergodic)."""
    while True:
        X = rng.random((states, states))
        if sparsity:
            X[rng.random((states, states)) < sparsity] = 0.0
        if (X.sum(axis=1) == 0).any():
            continue
        P = X / X.sum(axis=1, keepdims=True)
        rep = check_assumptions(P)
        if rep.ok:
            return P
