"""Exception hierarchy shared by every module of the package."""


class NgnbError(Exception):
    """Base class for all errors raised by :mod:`ngnb`."""


class InvalidParams(NgnbError, ValueError):
    """Parameter triple (or pair) outside its valid domain."""


class DomainError(NgnbError, ValueError):
    """Argument outside the domain where an operation is defined."""


class DivergentSeries(DomainError):
    """Requested series does not converge for the given parameters."""


class Undefined(DomainError):
    """Quantity does not exist for the given parameters."""


class NumericalError(NgnbError, ArithmeticError):
    """Base class for failures of floating-point evaluation."""


class IterationLimitExceeded(NumericalError):
    """Series truncation needs more terms than the configured cap."""


class NumericalOverflow(NumericalError):
    """Result exceeds the representable double range."""


class NumericalUnderflow(NumericalError):
    """Result is too small to be computed with meaningful accuracy."""


class DegenerateDistribution(NumericalError):
    """Distribution is numerically a point mass at zero."""


class FitFailed(NumericalError):
    """Likelihood is non-finite everywhere on the search grid."""
