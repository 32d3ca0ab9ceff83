"""Epoch schedules ``tau = tau0 + zeta * T``."""

from dataclasses import dataclass


@dataclass(frozen=True)
class EpochSchedule:
    """Linear epoch-length schedule.

    Parameters
    ----------
    tau0 : int
        Length of an arm's first epoch.
    zeta : int
        Increment per previous pull of the same arm.  ``zeta=0`` is
        accepted only with ``allow_constant=True``; constant epochs break
        the mixing argument and exist to demonstrate that failure.
    """

    tau0: int = 1
    zeta: int = 1
    allow_constant: bool = False

    def __post_init__(self):
        if int(self.tau0) != self.tau0 or self.tau0 < 1:
            raise ValueError(f"tau0 must be a positive integer, got {self.tau0!r}")
        lowest = 0 if self.allow_constant else 1
        if int(self.zeta) != self.zeta or self.zeta < lowest:
            raise ValueError(f"zeta must be an integer >= {lowest}, got {self.zeta!r}")
        object.__setattr__(self, "tau0", int(self.tau0))
        object.__setattr__(self, "zeta", int(self.zeta))

    @property
    def conforming(self):
        return self.zeta >= 1

    def length(self, pulls):
        if pulls < 0:
            raise ValueError("pull count must be nonnegative")
        return self.tau0 + self.zeta * int(pulls)


def epoch_length(schedule, T_j):
    """Epoch length for an arm already pulled ``T_j`` times."""
    return schedule.length(T_j)
