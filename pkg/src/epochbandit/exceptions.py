"""Exception hierarchy."""


class EpochBanditError(Exception):
    """Base class for all package errors."""


class NotStochasticError(EpochBanditError, ValueError):
    """Matrix rows or a distribution do not sum to one, or contain invalid entries."""


class NonErgodicChain(EpochBanditError, ValueError):
    """Transition matrix is not irreducible and aperiodic."""


class SpectralAssumptionViolated(EpochBanditError, ValueError):
    """The multiplicative reversiblization has no spectral gap."""


class InvalidArm(EpochBanditError, IndexError):
    pass


class InvalidTau(EpochBanditError, ValueError):
    pass


class UninitializedArm(EpochBanditError, RuntimeError):
    """EpochUCB asked to score an arm that has never been pulled."""


class ZeroGap(EpochBanditError, ValueError):
    """A gap-dependent bound was requested for an arm with zero gap."""


class OutOfValidityRange(EpochBanditError, ValueError):
    """A bound was evaluated outside the epochs for which it is proven."""


class GenerationExhausted(EpochBanditError, RuntimeError):
    """The random instance generator ran out of retries."""
