"""Cyclic Jacobi eigenvalue solver for small dense symmetric matrices."""

import numpy as np

from ._tolerances import TOL


def _off_norm(A):
    off = A - np.diag(np.diag(A))
    return np.linalg.norm(off)


def jacobi_eigenvalues(S, tol=TOL.jacobi, max_sweeps=100):
    """Eigenvalues of a symmetric matrix, sorted ascending.

    Sweeps the upper triangle row by row, annihilating each off-diagonal
    entry with a Givens rotation, until the off-diagonal Frobenius norm
    drops below ``tol`` times the Frobenius norm of ``S``.
    """
    A = np.array(S, dtype=float, copy=True)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("S must be square")
    if not np.allclose(A, A.T, atol=1e-10, rtol=0.0):
        raise ValueError("S must be symmetric")
    A = 0.5 * (A + A.T)
    n = A.shape[0]
    scale = max(np.linalg.norm(A), np.finfo(float).tiny)
    sweeps = 0
    while _off_norm(A) > tol * scale:
        if sweeps == max_sweeps:
            raise RuntimeError(f"Jacobi did not converge in {max_sweeps} sweeps")
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) <= np.finfo(float).tiny:
                    continue
                tau = (A[q, q] - A[p, p]) / (2.0 * apq)
                t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.hypot(1.0, tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                col_p = A[:, p].copy()
                col_q = A[:, q].copy()
                A[:, p] = c * col_p - s * col_q
                A[:, q] = s * col_p + c * col_q
                row_p = A[p, :].copy()
                row_q = A[q, :].copy()
                A[p, :] = c * row_p - s * row_q
                A[q, :] = s * row_p + c * row_q
                A[p, q] = A[q, p] = 0.0
    return np.sort(np.diag(A))
