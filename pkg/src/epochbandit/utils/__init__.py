from .validation import (
    check_distribution,
    check_gamma,
    check_positive_int,
    check_transition_matrix,
)
from .random import mix64, replication_seed, check_random_state

__all__ = [
    "check_distribution",
    "check_gamma",
    "check_positive_int",
    "check_transition_matrix",
    "check_random_state",
    "mix64",
    "replication_seed",
]
