"""Exception types raised by the numerical routines."""


class ZenoError(Exception):
    """Base class for all package errors."""


class ContractViolation(ZenoError, ValueError):
    """An input failed a documented precondition (e.g. a non-Hermitian generator)."""


class NumericalFailure(ZenoError, RuntimeError):
    """An iterative routine did not converge, or a result is numerically unusable.

    ``partial`` holds whatever intermediate data the routine had reached
    (for the eigensolver, the partial Schur form ``(T, Q)``).
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class UnsupportedDecomposition(ZenoError):
    """Spectral-form operation requested on a defective (non-diagonalizable) channel."""


class NotCompletelyPositive(ZenoError, ValueError):
    """The Choi matrix has a significantly negative eigenvalue."""


class ZeroProbabilityOutcome(ZenoError, ValueError):
    """Post-measurement state requested for an outcome with vanishing probability."""
