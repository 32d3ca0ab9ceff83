"""Seed derivation so that replications never share a random stream."""

import numbers

import numpy as np

_MASK = (1 << 64) - 1


def _splitmix64(x):
    x = (x + 0x9E3779B97F4A7C15) & _MASK
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK
    return x ^ (x >> 31)


def mix64(a, b):
    """Hash two integers into one 64-bit seed (splitmix64 applied twice)."""
    return _splitmix64(_splitmix64(int(a) & _MASK) ^ (int(b) & _MASK))


def replication_seed(master_seed, index):
    return mix64(master_seed, index)


def check_random_state(seed):
    """Turn ``None``, an int, or a Generator into a ``numpy.random.Generator``."""
    if isinstance(seed, np.random.Generator):
        return seed
    if seed is None or isinstance(seed, numbers.Integral):
        return np.random.default_rng(seed)
    raise TypeError(f"cannot build a Generator from {seed!r}")
