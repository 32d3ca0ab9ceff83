"""Numerical tolerances shared by every module."""

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    stochastic: float = 1e-12
    stationary: float = 1e-10
    jacobi: float = 1e-12
    edge: float = 1e-15
    top_eigenvalue: float = 1e-9
    negative_eigenvalue: float = 1e-9
    spectral_gap: float = 1e-12
    renormalize: float = 1e-12
    power_iteration: float = 1e-13
    power_iteration_steps: int = 1_000_000
    discount_mass: float = 1e-9
    min_gamma: float = 1e-9
    branch: float = 1e-6


TOL = Tolerances()
