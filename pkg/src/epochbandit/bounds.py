"""Closed-form mixing and regret bounds for epoch-mixing policies.

Every function here is a pure evaluation of a printed formula.  Three
regimes recur throughout:

``"avg"``
    time-averaged feedback (``gamma == 1``);
``"distinct"``
    discounted feedback with ``gamma`` away from every arm's ``lambda_j``;
``"equal"``
    discounted feedback with ``gamma`` numerically equal to some
    ``lambda_j``.  The equal-case expressions remain valid upper bounds
    in the distinct case, so falling back to them is always sound.
"""

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from ._tolerances import TOL
from .exceptions import OutOfValidityRange, ZeroGap
from .schedule import EpochSchedule

BRANCHES = ("avg", "distinct", "equal")
_LOG_FLOOR = -700.0


def _pow(base, exponent):
    """``base ** exponent`` for ``base`` in [0, 1], computed in log space near underflow."""
    if base <= 0.0:
        return 0.0 if exponent > 0 else 1.0
    logv = exponent * math.log(base)
    if logv < _LOG_FLOOR:
        return 0.0
    return math.exp(logv)


def select_branch(stats, gamma=None, tol=TOL.branch):
    """Pick one regime for a whole family of arms.

    Parameters
    ----------
    stats : ChainStats or sequence of ChainStats
    gamma : float, optional
        Defaults to the ``gamma`` stored in the stats.
    """
    if not isinstance(stats, (list, tuple)):
        stats = [stats]
    g = stats[0].gamma if gamma is None else gamma
    if g == 1.0:
        return "avg"
    gap = min(abs(g - s.lambda_j) for s in stats)
    return "distinct" if gap > tol else "equal"


def _resolve(stats, gamma, branch):
    s = stats.with_gamma(gamma) if gamma is not None and gamma != stats.gamma else stats
    if branch is None:
        branch = select_branch(s)
    if branch not in BRANCHES:
        raise ValueError(f"unknown branch {branch!r}")
    if (branch == "avg") != (s.gamma == 1.0):
        raise ValueError(f"branch {branch!r} does not match gamma={s.gamma}")
    return s, branch


# ---------------------------------------------------------------------------
# summation helpers

def harmonic_sum_exact(tau0, zeta, n):
    """``sum_{i=1}^{n} 1 / (tau0 + zeta (i - 1))``."""
    i = np.arange(int(n), dtype=float)
    return float(np.sum(1.0 / (tau0 + zeta * i)))


def harmonic_bound(tau0, zeta, n):
    """Integral upper bound ``1/tau0 + ln(1 + zeta n / tau0) / zeta`` on the harmonic sum."""
    if zeta == 0:
        return n / tau0
    return 1.0 / tau0 + math.log1p(zeta * n / tau0) / zeta


def arith_geo_sum(a, d, r, n):
    """Closed form of ``sum_{i=1}^{n} r^(i-1) (a + d (i-1))`` for ``|r| < 1``."""
    if not abs(r) < 1:
        raise ValueError("arithmetico-geometric closed form needs |r| < 1")
    rn = r ** n if r < 0 else _pow(r, n)
    return (a - rn * (a + d * n)) / (1.0 - r) + d * r * (1.0 - rn) / (1.0 - r) ** 2


def arith_geo_limit(a, d, r):
    """Infinite-series value ``a/(1-r) + d r/(1-r)^2``."""
    if not abs(r) < 1:
        raise ValueError("arithmetico-geometric series needs |r| < 1")
    return a / (1.0 - r) + d * r / (1.0 - r) ** 2


# ---------------------------------------------------------------------------
# mixing terms

def upsilon(stats, gamma=None, tau=1, branch=None):
    """Mixing factor ``Upsilon_j(tau)`` of the expected-reward convergence lemma."""
    s, branch = _resolve(stats, gamma, branch)
    if tau < 1:
        raise ValueError("tau must be >= 1")
    if branch == "avg":
        lam = s.lambda_j
        return (1.0 - _pow(lam, tau)) / (1.0 - lam)
    phi, psi = s.phi, s.psi
    if branch == "equal":
        return _pow(phi, tau - 1) * tau
    return _pow(phi, tau - 1) * (1.0 - _pow(psi, tau)) / (1.0 - psi)


def L(stats, schedule, gamma=None, n=1, branch=None):
    """Cumulative mixing penalty ``L_j^gamma(n)`` after ``n`` pulls of one arm."""
    s, branch = _resolve(stats, gamma, branch)
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n == 0:
        return 0.0
    tau0, zeta = schedule.tau0, schedule.zeta
    C = s.C
    if branch == "avg":
        return C / (1.0 - s.lambda_j) * harmonic_bound(tau0, zeta, n)
    phi, eta = s.phi, s.eta
    r = _pow(phi, zeta)
    rn = _pow(phi, zeta * n)
    if zeta == 0:
        # constant epochs: every term equals the first
        if branch == "equal":
            return C * _pow(phi, tau0 - 1) * tau0 * n
        return C * _pow(phi, tau0) / (phi - eta) * n
    if branch == "equal":
        return C * _pow(phi, tau0 - 1) * (
            (tau0 - rn * (tau0 + zeta * n)) / (1.0 - r)
            + zeta * r * (1.0 - rn) / (1.0 - r) ** 2
        )
    return C * _pow(phi, tau0) / (phi - eta) * (1.0 - rn) / (1.0 - r)


def rho(stats, schedule, gamma=None, branch=None):
    """Constant ``rho_j`` entering the EpochUCB play-count bound."""
    s, branch = _resolve(stats, gamma, branch)
    tau0, zeta = schedule.tau0, schedule.zeta
    if zeta == 0:
        raise ValueError("rho is undefined for constant epochs")
    C = s.C
    if branch == "avg":
        return C / (math.sqrt(zeta * tau0) * (1.0 - s.lambda_j)) * (1.0 + zeta / tau0)
    phi, eta = s.phi, s.eta
    r = _pow(phi, zeta)
    if branch == "equal":
        return C * _pow(phi, tau0 - 1) * (tau0 / (1.0 - r) + zeta * r / (1.0 - r) ** 2)
    return C * _pow(phi, tau0) / (phi - eta) / (1.0 - r)


# ---------------------------------------------------------------------------
# EpochUCB

def _check_gap(delta):
    if not delta > 0:
        raise ZeroGap(f"bound undefined for gap {delta!r}")


def thm1_plays_bound(delta_j, rho_j, n):
    """Upper bound on the expected number of epochs spent on a suboptimal arm."""
    _check_gap(delta_j)
    if n < 1:
        raise ValueError("n must be >= 1")
    ln = math.log(n)
    return 4.0 / delta_j ** 2 * (rho_j + math.sqrt(6.0 * ln)) ** 2 + 3.0 + 2.0 * ln


def distinguishing_threshold(delta_j, rho_j, n):
    """Smallest pull count ``l`` after which the confidence windows separate; at least 1."""
    _check_gap(delta_j)
    raw = 4.0 / delta_j ** 2 * (rho_j + math.sqrt(6.0 * math.log(n))) ** 2
    return max(1, math.ceil(raw))


@dataclass(frozen=True)
class BoundInputs:
    """Everything the regret bounds need about one instance.

    ``branch`` is chosen once for all arms so the bounds stay comparable.
    """

    stats: tuple
    schedule: EpochSchedule
    gamma: float
    gaps: np.ndarray
    branch: str = field(default=None)

    def __post_init__(self):
        stats = tuple(s.with_gamma(self.gamma) if s.gamma != self.gamma else s for s in self.stats)
        object.__setattr__(self, "stats", stats)
        object.__setattr__(self, "gaps", np.asarray(self.gaps, dtype=float))
        if self.branch is None:
            object.__setattr__(self, "branch", select_branch(stats, self.gamma))
        if len(stats) != len(self.gaps):
            raise ValueError("one gap per arm required")

    @classmethod
    def from_instance(cls, instance, schedule, gamma=None, branch=None):
        g = instance.gamma if gamma is None else gamma
        from .environment import gaps
        return cls(instance.stats(g), schedule, g, gaps(instance), branch)

    @property
    def m(self):
        return len(self.stats)

    @property
    def optimal_arm(self):
        return int(np.argmin(self.gaps))

    @property
    def suboptimal(self):
        j_star = self.optimal_arm
        return [j for j in range(self.m) if j != j_star and self.gaps[j] > 0]

    def L(self, j, n):
        return L(self.stats[j], self.schedule, self.gamma, n, self.branch)

    def rho(self, j):
        return rho(self.stats[j], self.schedule, self.gamma, self.branch)

    def L_total(self, n):
        return sum(self.L(j, n) for j in range(self.m))


def cor1_regret_bound(inputs, n):
    """Gap-dependent EpochUCB regret bound after ``n`` epochs."""
    ln = math.log(n)
    total = 0.0
    for j in inputs.suboptimal:
        d = inputs.gaps[j]
        total += 4.0 / d * (inputs.rho(j) + math.sqrt(6.0 * ln)) ** 2 + 3.0 * d + 2.0 * d * ln
    return total + inputs.L_total(n)


def cor2_regret_bound(inputs, n, appendix_constant=False):
    """Gap-independent EpochUCB regret bound.

    ``appendix_constant=True`` uses the trailing ``+3`` of the longer
    derivation instead of the ``+2`` of the headline statement.
    """
    ln = math.log(n)
    tail = 3.0 if appendix_constant else 2.0
    inner = 0.0
    for j in range(inputs.m):
        r = inputs.rho(j)
        inner += 4.0 * r * r + 8.0 * r * math.sqrt(6.0 * ln) + 26.0 * ln + tail
    return math.sqrt(n * inner) + inputs.L_total(n)


# ---------------------------------------------------------------------------
# EpochGreedy

@dataclass(frozen=True)
class GreedyConfig:
    """Exploration constants of EpochGreedy.

    Parameters
    ----------
    c : float
        Exploration scale in ``epsilon_k = min(1, c m / (d^2 k))``.
    d : float
        Lower bound on the smallest gap.
    c_prime : float
        Must exceed 8.
    kappa : float
        ``max_{j, i} L_j(i) / sqrt(i)``.
    strict : bool
        If True, enforce ``c >= c_prime * nu^2``.  Tuned configurations
        with smaller ``c`` set this to False; they still run but are
        outside the theorem's hypotheses.
    """

    c: float
    d: float
    c_prime: float = 9.0
    kappa: float = 0.0
    strict: bool = True

    def __post_init__(self):
        if not self.c > 0:
            raise ValueError("c must be positive")
        if not self.d > 0:
            raise ValueError("d must be positive")
        if not self.c_prime > 8:
            raise ValueError("c_prime must exceed 8")
        if self.kappa < 0:
            raise ValueError("kappa must be nonnegative")
        if self.strict and self.c < self.c_prime * self.nu ** 2 * (1 - 1e-12):
            raise ValueError(f"c={self.c} below c' nu^2={self.c_prime * self.nu ** 2}")

    @property
    def nu(self):
        return max(self.kappa, self.d / math.sqrt(self.c_prime))

    @property
    def c_dblprime(self):
        return 4.0 * self.c_prime / (math.sqrt(self.c_prime / 2.0) - 2.0) ** 2

    @property
    def satisfies_theory(self):
        return self.c >= self.c_prime * self.nu ** 2 * (1 - 1e-12)

    @classmethod
    def from_theory(cls, kappa, d, c_prime=9.0):
        nu = max(kappa, d / math.sqrt(c_prime))
        return cls(c=c_prime * nu * nu, d=d, c_prime=c_prime, kappa=kappa)

    def threshold(self, m):
        """First epoch at which the probability bound applies."""
        return max(2, math.ceil(self.c * m / self.d ** 2))


def epsilon_k(config, m, k):
    """Exploration probability at epoch ``k``."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return min(1.0, config.c * m / (config.d ** 2 * k))


def kappa(L_eval, n, m):
    """``max_{j < m, 1 <= i <= n} L_eval(j, i) / sqrt(i)`` by exhaustive scan."""
    best = 0.0
    for j in range(m):
        for i in range(1, int(n) + 1):
            best = max(best, L_eval(j, i) / math.sqrt(i))
    return best


def kappa_from_inputs(inputs, n):
    return kappa(inputs.L, n, inputs.m)


def thm2_prob_bound(config, m, k):
    """Bound on the probability that EpochGreedy plays a given suboptimal arm at epoch ``k``."""
    if k < config.threshold(m):
        raise OutOfValidityRange(f"k={k} below validity threshold {config.threshold(m)}")
    c, d, cpp = config.c, config.d, config.c_dblprime
    d2 = d * d
    base = (k - 1) * d2 * math.sqrt(math.e) / (c * m)
    ratio = 1.0 / base
    first = c / (d2 * k)
    second = max(0.0, 2.0 * c / d2 * math.log(base) * ratio ** (c / (5.0 * d2)))
    third = 2.0 * cpp * math.e / d2 * ratio ** (c / cpp)
    return first + second + third


def cor3_regret_bound(config, inputs, n):
    """Constructive EpochGreedy regret bound: gap-weighted sum of per-epoch bounds, clipped at 1."""
    m = inputs.m
    start = config.threshold(m)
    tail = 0.0
    for k in range(start, int(n) + 1):
        tail += min(1.0, thm2_prob_bound(config, m, k))
    per_arm = min(int(n), start - 1) + tail
    gap_sum = float(sum(inputs.gaps[j] for j in inputs.suboptimal))
    return gap_sum * per_arm + inputs.L_total(n)


# ---------------------------------------------------------------------------
# curves

CURVE_KINDS = ("L", "regret_cor1", "regret_cor2", "regret_cor3", "thm1_plays", "thm2_prob")


@dataclass(frozen=True)
class BoundCurve:
    kind: str
    points: tuple
    arm: int = -1

    def __post_init__(self):
        if self.kind not in CURVE_KINDS:
            raise ValueError(f"unknown curve kind {self.kind!r}")
        object.__setattr__(self, "points", tuple((int(k), float(v)) for k, v in self.points))

    @property
    def x(self):
        return np.array([p[0] for p in self.points])

    @property
    def y(self):
        return np.array([p[1] for p in self.points])

    def rows(self):
        return [(k, repr(v), self.kind, self.arm) for k, v in self.points]


def write_curves_csv(curves, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["k", "value", "kind", "arm"])
        for curve in curves:
            w.writerows(curve.rows())


def bound_curves(inputs, ns, config=None):
    """Evaluate every applicable curve at horizons ``ns``."""
    ns = [int(n) for n in ns]
    curves = [BoundCurve("regret_cor1", [(n, cor1_regret_bound(inputs, n)) for n in ns]),
              BoundCurve("regret_cor2", [(n, cor2_regret_bound(inputs, n)) for n in ns])]
    for j in range(inputs.m):
        curves.append(BoundCurve("L", [(n, inputs.L(j, n)) for n in ns], arm=j))
    for j in inputs.suboptimal:
        rj = inputs.rho(j)
        curves.append(BoundCurve("thm1_plays",
                                 [(n, thm1_plays_bound(inputs.gaps[j], rj, n)) for n in ns], arm=j))
    if config is not None:
        curves.append(BoundCurve("regret_cor3", [(n, cor3_regret_bound(config, inputs, n)) for n in ns]))
        lo = config.threshold(inputs.m)
        ks = [n for n in ns if n >= lo]
        curves.append(BoundCurve("thm2_prob", [(k, thm2_prob_bound(config, inputs.m, k)) for k in ks]))
    return curves
