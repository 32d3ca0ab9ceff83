"""Finite Markov-chain linear algebra.

Stationary distributions, time reversal, the multiplicative
reversiblization ``M(P) = P P~`` and its second eigenvalue, assumption
checks, distribution propagation and Fill's chi-squared convergence bound.
Every function is pure; inputs are never modified.
"""

from dataclasses import dataclass

import numpy as np

from ._tolerances import TOL
from .exceptions import NonErgodicChain, SpectralAssumptionViolated
from .linalg import jacobi_eigenvalues
from .utils.validation import check_distribution, check_gamma, check_positive_int, check_transition_matrix


@dataclass(frozen=True)
class AssumptionReport:
    irreducible: bool
    aperiodic: bool
    M_irreducible: bool

    @property
    def ergodic(self):
        return self.irreducible and self.aperiodic

    @property
    def ok(self):
        return self.irreducible and self.aperiodic and self.M_irreducible


@dataclass(frozen=True)
class ChainStats:
    """Spectral constants of one arm's chain that feed every bound.

    Attributes
    ----------
    pi : ndarray
        Stationary distribution.
    lambda2M : float
        Second largest eigenvalue of the multiplicative reversiblization.
    lambda_j : float
        ``sqrt(lambda2M)``, the geometric mixing rate.
    C : float
        ``0.5 * sqrt(1 + (1 - min pi)**2 / min pi)``.
    eta, phi, psi : float
        ``min(gamma, lambda_j)``, ``max(gamma, lambda_j)`` and their ratio
        (zero when ``phi`` is zero).
    gamma : float
        Discount factor the constants were derived for.
    """

    pi: np.ndarray
    lambda2M: float
    lambda_j: float
    C: float
    eta: float
    phi: float
    psi: float
    gamma: float

    def with_gamma(self, gamma):
        return _stats_from(self.pi, self.lambda2M, gamma)


# ---------------------------------------------------------------------------
# graph structure

def _adjacency(P):
    return np.asarray(P) > TOL.edge


def _bool_matmul(A, B):
    return (A.astype(np.int64) @ B.astype(np.int64)) > 0


def _reachability(A):
    n = A.shape[0]
    R = A | np.eye(n, dtype=bool)
    for _ in range(max(1, int(np.ceil(np.log2(n))) + 1)):
        R_next = _bool_matmul(R, R)
        if np.array_equal(R_next, R):
            break
        R = R_next
    return R


def _bool_power(A, k):
    result = np.eye(A.shape[0], dtype=bool)
    base = A.copy()
    while k:
        if k & 1:
            result = _bool_matmul(result, base)
        base = _bool_matmul(base, base)
        k >>= 1
    return result


def _is_primitive(A):
    # Wielandt: an irreducible nonnegative matrix is primitive iff A^((n-1)^2+1) > 0.
    n = A.shape[0]
    return bool(np.all(_bool_power(A, (n - 1) ** 2 + 1)))


def _is_strongly_connected(A):
    return bool(np.all(_reachability(A)))


def _classes(A):
    R = _reachability(A)
    mutual = R & R.T
    seen = np.zeros(A.shape[0], dtype=bool)
    classes = []
    for i in range(A.shape[0]):
        if not seen[i]:
            members = np.flatnonzero(mutual[i])
            seen[members] = True
            classes.append(members)
    return classes


def check_assumptions(P):
    """Check irreducibility, aperiodicity and irreducibility of ``M(P)``.

    Aperiodicity is decided exactly with boolean matrix powers: an
    irreducible chain is aperiodic iff its adjacency matrix is primitive.
    For a reducible chain every communicating class containing a cycle
    must be primitive.
    """
    P = check_transition_matrix(P)
    A = _adjacency(P)
    irreducible = _is_strongly_connected(A)
    if irreducible:
        aperiodic = _is_primitive(A)
    else:
        aperiodic = True
        for members in _classes(A):
            sub = A[np.ix_(members, members)]
            if members.size == 1 and not sub[0, 0]:
                continue
            aperiodic &= _is_primitive(sub)
    M_irreducible = False
    if irreducible:
        pi = _solve_stationary(P)
        M = P @ _reverse(P, pi)
        M_irreducible = _is_strongly_connected(_adjacency(M))
    return AssumptionReport(bool(irreducible), bool(aperiodic), bool(M_irreducible))


# ---------------------------------------------------------------------------
# stationary distribution and reversal

def _power_iteration(P):
    n = P.shape[0]
    pi = np.full(n, 1.0 / n)
    for _ in range(TOL.power_iteration_steps):
        nxt = pi @ P
        nxt /= nxt.sum()
        if np.abs(nxt - pi).sum() < TOL.power_iteration:
            return nxt
        pi = nxt
    raise NonErgodicChain("power iteration did not converge")


def _solve_stationary(P):
    n = P.shape[0]
    A = P.T - np.eye(n)
    A[-1, :] = 1.0
    b = np.zeros(n)
    b[-1] = 1.0
    try:
        pi = np.linalg.solve(A, b)
    except np.linalg.LinAlgError:
        pi = None
    if pi is None or not np.all(np.isfinite(pi)) or np.abs(pi @ P - pi).sum() > TOL.stationary or pi.min() < -TOL.stationary:
        pi = _power_iteration(P)
    pi = np.clip(pi, 0.0, None)
    return pi / pi.sum()


def stationary_distribution(P):
    """Unique stationary distribution of an ergodic chain.

    Solves ``(P^T - I) pi = 0`` with the last equation replaced by the
    normalization constraint, falling back to power iteration when the
    solve is singular or inaccurate.

    Raises
    ------
    NonErgodicChain
        If ``P`` is not irreducible and aperiodic.
    """
    P = check_transition_matrix(P)
    report = check_assumptions(P)
    if not report.ergodic:
        raise NonErgodicChain(
            f"chain is not ergodic (irreducible={report.irreducible}, aperiodic={report.aperiodic})"
        )
    pi = _solve_stationary(P)
    pi.setflags(write=False)
    return pi


def _reverse(P, pi):
    R = (P.T * pi[None, :]) / pi[:, None]
    # rounding can push an entry a few ulps past 1
    return np.clip(R, 0.0, 1.0)


def time_reversal(P, pi):
    """Time reversal ``P~(x, y) = pi(y) P(y, x) / pi(x)``."""
    P = check_transition_matrix(P)
    pi = np.asarray(pi, dtype=float)
    if pi.shape != (P.shape[0],) or pi.min() <= 0.0:
        raise ValueError("pi must be a strictly positive vector matching P")
    return check_transition_matrix(_reverse(P, pi), name="time reversal")


def multiplicative_reversiblization(P, pi=None):
    """``M(P) = P P~``; reversible with respect to ``pi``."""
    P = check_transition_matrix(P)
    if pi is None:
        pi = stationary_distribution(P)
    M = np.clip(P @ time_reversal(P, pi), 0.0, 1.0)
    return check_transition_matrix(M, name="M(P)")


def lambda2_M(P, pi=None):
    """Second largest eigenvalue of ``M(P)``.

    ``M`` is similar to the symmetric ``D^(1/2) M D^(-1/2)`` with
    ``D = diag(pi)``, whose spectrum is computed by cyclic Jacobi.

    Raises
    ------
    SpectralAssumptionViolated
        If the second eigenvalue is numerically 1.
    """
    P = check_transition_matrix(P)
    if pi is None:
        pi = stationary_distribution(P)
    pi = np.asarray(pi, dtype=float)
    M = P @ _reverse(P, pi)
    root = np.sqrt(pi)
    S = root[:, None] * M / root[None, :]
    eig = jacobi_eigenvalues(0.5 * (S + S.T))
    if abs(eig[-1] - 1.0) > TOL.top_eigenvalue:
        raise SpectralAssumptionViolated(f"top eigenvalue of M(P) is {eig[-1]!r}, expected 1")
    if eig[0] < -TOL.negative_eigenvalue:
        raise SpectralAssumptionViolated(f"M(P) has negative eigenvalue {eig[0]!r}")
    if eig.size == 1:
        return 0.0
    lam2 = float(max(eig[-2], 0.0))
    if lam2 >= 1.0 - TOL.spectral_gap:
        raise SpectralAssumptionViolated(f"lambda2(M(P)) = {lam2!r} has no spectral gap")
    return lam2


def mixing_constant(pi):
    """Distribution-free constant ``0.5 * sqrt(1 + (1 - min pi)^2 / min pi)``."""
    p = float(np.min(pi))
    return 0.5 * np.sqrt(1.0 + (1.0 - p) ** 2 / p)


def _stats_from(pi, lam2, gamma):
    gamma = check_gamma(gamma)
    lam = float(np.sqrt(lam2))
    eta = min(gamma, lam)
    phi = max(gamma, lam)
    psi = eta / phi if phi > 0 else 0.0
    return ChainStats(pi=pi, lambda2M=lam2, lambda_j=lam, C=float(mixing_constant(pi)),
                      eta=eta, phi=phi, psi=psi, gamma=gamma)


def chain_stats(P, gamma):
    P = check_transition_matrix(P)
    report = check_assumptions(P)
    if not report.ergodic:
        raise NonErgodicChain(f"chain fails Assumption 1: {report}")
    if not report.M_irreducible:
        raise SpectralAssumptionViolated("M(P) is not irreducible")
    pi = stationary_distribution(P)
    return _stats_from(pi, lambda2_M(P, pi), gamma)


# ---------------------------------------------------------------------------
# propagation and convergence

def _normalized(beta):
    s = beta.sum()
    if abs(s - 1.0) > TOL.renormalize:
        beta = beta / s
    return beta


def distribution_path(beta, P, steps):
    """Rows ``beta P^t`` for ``t = 0..steps``.

    Stops multiplying once the iterate is an exact floating-point fixed
    point and repeats it, which leaves the result bit-identical.  Rows of
    a float matrix may sum to ``1 +- 1e-16``; the returned rows are scaled
    to unit mass so that leaked mass cannot build up across calls that
    chain one path's last row into the next.
    """
    P = np.asarray(P, dtype=float)
    out = np.empty((steps + 1, P.shape[0]))
    cur = np.asarray(beta, dtype=float)
    out[0] = cur
    for t in range(1, steps + 1):
        nxt = cur @ P
        if np.array_equal(nxt, cur):
            out[t:] = cur
            break
        out[t] = nxt
        cur = nxt
    out /= out.sum(axis=1, keepdims=True)
    return out


def evolve(beta, P, tau):
    """Distribution after ``tau`` steps: ``beta^T P^tau``."""
    P = check_transition_matrix(P)
    beta = check_distribution(beta, P.shape[0])
    check_positive_int(tau, "tau")
    return _normalized(distribution_path(beta, P, tau)[-1])


def chi_squared(beta, pi):
    beta = np.asarray(beta, dtype=float)
    pi = np.asarray(pi, dtype=float)
    return float(np.sum((beta - pi) ** 2 / pi))


def fill_bound(chi0sq, lambda2M, n):
    """Right-hand side ``chi0^2 * lambda2(M)^n / 4`` of Fill's bound."""
    if chi0sq < 0 or n < 0:
        raise ValueError("chi0sq and n must be nonnegative")
    return 0.25 * chi0sq * lambda2M ** n


def fill_bound_uniform(pi, lambda2M, n):
    """Fill's bound maximized over initial distributions."""
    p = float(np.min(pi))
    return fill_bound(1.0 + (1.0 - p) ** 2 / p, lambda2M, n)
