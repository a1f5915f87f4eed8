"""Exception hierarchy shared by all modules."""


class QMVTError(Exception):
    """Base class for errors raised by :mod:`qmvt`."""


class ValidationError(QMVTError, ValueError):
    """A constructor argument violates its precondition."""


class DivergenceError(QMVTError, ArithmeticError):
    """A quadrature or tail integral failed to converge.

    The partially converged value, when available, is kept in ``partial``.
    """

    def __init__(self, message, partial=None, error_estimate=None):
        super().__init__(message)
        self.partial = partial
        self.error_estimate = error_estimate


class DomainError(QMVTError, ValueError):
    """A distribution lies outside the family an operation requires."""


class DegenerateBridgeError(QMVTError, ValueError):
    """The mass gap between the two endpoint laws of a bridge is not positive."""


class HypothesisError(QMVTError, ValueError):
    """An ordering hypothesis (dominance, NBU) fails on the check grid."""


class SamplingRefusedError(QMVTError, RuntimeError):
    """Sampling was requested from a bridge whose density is not nonnegative."""


class ArityError(QMVTError, ValueError):
    """A test function does not supply a derivative of the requested order."""
