"""Exception hierarchy shared by all flatcycle modules."""


class FlatCycleError(Exception):
    """Base class for every error raised by this package."""


class ChiNonZero(FlatCycleError, ValueError):
    """Weights of a would-be cycle do not sum to zero."""


class OutOfCube(FlatCycleError, ValueError):
    """A point leaves [-1, 1]^n by more than the clamping slack."""


class DimensionMismatch(FlatCycleError, ValueError):
    """Objects of different ambient dimension were combined."""


class SolverStall(FlatCycleError, RuntimeError):
    """An iterative solver hit its iteration cap before certifying optimality.

    ``primal`` and ``dual`` carry the best bounds known when it stopped.
    """

    def __init__(self, message, primal=None, dual=None):
        super().__init__(message)
        self.primal = primal
        self.dual = dual


class SizeOverflow(FlatCycleError, ValueError):
    """An enumeration would exceed the configured size cap."""


class BadEps(FlatCycleError, ValueError):
    """A scale parameter lies outside (0, 1]."""


class BadParams(FlatCycleError, ValueError):
    """Invalid generator or command parameters."""


class MembershipFail(FlatCycleError, ValueError):
    """A quantized cycle exceeds the mass cap of its class."""
