"""Input validation helpers in the spirit of ``sklearn.utils.validation``."""

import numbers

import numpy as np

from .._tolerances import TOL
from ..exceptions import NotStochasticError


def check_transition_matrix(P, *, name="P", atol=TOL.stochastic):
    """Validate a row-stochastic matrix and return it as a read-only float array.

    Raises
    ------
    NotStochasticError
        If ``P`` is not square, has entries outside [0, 1], or a row that
        does not sum to one within ``atol``.
    """
    P = np.array(P, dtype=float, copy=True)
    if P.ndim != 2 or P.shape[0] != P.shape[1] or P.shape[0] == 0:
        raise NotStochasticError(f"{name} must be a non-empty square matrix, got shape {P.shape}")
    if not np.all(np.isfinite(P)):
        raise NotStochasticError(f"{name} contains non-finite entries")
    if P.min() < 0.0 or P.max() > 1.0:
        raise NotStochasticError(f"{name} has entries outside [0, 1]")
    sums = P.sum(axis=1)
    bad = np.flatnonzero(np.abs(sums - 1.0) > atol)
    if bad.size:
        raise NotStochasticError(
            f"{name} row {int(bad[0])} sums to {sums[bad[0]]!r}, not 1 (tol {atol:g})"
        )
    P.setflags(write=False)
    return P


def check_distribution(beta, n_states=None, *, name="beta", atol=TOL.stochastic):
    beta = np.array(beta, dtype=float, copy=True)
    if beta.ndim != 1 or beta.size == 0:
        raise NotStochasticError(f"{name} must be a non-empty vector")
    if n_states is not None and beta.size != n_states:
        raise NotStochasticError(f"{name} has {beta.size} entries, expected {n_states}")
    if not np.all(np.isfinite(beta)) or beta.min() < 0.0:
        raise NotStochasticError(f"{name} must be nonnegative and finite")
    if abs(beta.sum() - 1.0) > atol:
        raise NotStochasticError(f"{name} sums to {beta.sum()!r}, not 1")
    beta.setflags(write=False)
    return beta


def check_gamma(gamma):
    """Discount factor in (0, 1]; values at or below ``TOL.min_gamma`` are ill-conditioned."""
    if not isinstance(gamma, numbers.Real) or not np.isfinite(gamma):
        raise ValueError(f"gamma must be a real number, got {gamma!r}")
    gamma = float(gamma)
    if gamma > 1.0 or gamma <= TOL.min_gamma:
        raise ValueError(f"gamma must lie in ({TOL.min_gamma:g}, 1], got {gamma}")
    return gamma


def check_positive_int(value, name, *, minimum=1):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise TypeError(f"{name} must be an integer, got {value!r}")
    if value < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {value}")
    return int(value)
