"""Exception hierarchy shared by all modules."""


class MLOrderError(Exception):
    """Base class for every error raised by :mod:`mlorder`."""


class DomainError(MLOrderError, ValueError):
    """An argument lies outside the domain where the operation is defined."""


class PoleError(DomainError):
    """The Gamma function was evaluated at one of its poles."""


class ConvergenceError(MLOrderError, ArithmeticError):
    """A series did not meet its stopping rule within the term budget."""


class UnsupportedOrderError(DomainError):
    """A derivative order that is not implemented was requested."""


class FitError(MLOrderError, ArithmeticError):
    """Limit extrapolation could not find an acceptable model."""


class SignalError(MLOrderError, ValueError):
    """Sampled data cannot be used, e.g. a vanishing or non-monotone signal."""


class MLOverflowError(MLOrderError, OverflowError):
    """A result is too large to be represented as a double."""
