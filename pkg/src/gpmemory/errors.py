"""Exception hierarchy shared by all modules."""


class GPMemoryError(Exception):
    """Base class for every error raised by this package."""


class DomainError(GPMemoryError, ValueError):
    """An argument lies outside the domain of an operation."""


class QuadratureError(GPMemoryError):
    """Adaptive quadrature could not reach the requested tolerance."""


class InfiniteSpeedKernel(GPMemoryError):
    """The kernel has no finite jet at t=0, so no front exists."""


class JetEstimationError(GPMemoryError):
    """Not enough samples to estimate a sampled kernel's jet at t=0."""


class UnsupportedBoundary(GPMemoryError, ValueError):
    """The boundary signal cannot be handled by the requested operation."""


class ConvergenceError(GPMemoryError):
    """Numerical inversion did not reach its target accuracy.

    Attributes
    ----------
    achieved : float
        The error estimate that was actually reached.
    """

    def __init__(self, message, achieved=float("nan")):
        super().__init__(message)
        self.achieved = achieved


class GridError(GPMemoryError, ValueError):
    """Grid parameters violate a solver resolution constraint."""


class NoFront(GPMemoryError):
    """A field column carries no detectable front."""


class FitError(GPMemoryError):
    """A least-squares fit is too poor to be trusted."""

    def __init__(self, message, r2=float("nan")):
        super().__init__(message)
        self.r2 = r2


class WindowOutOfRange(GPMemoryError, ValueError):
    """An analysis window falls outside the field grid."""


class ParseError(GPMemoryError, ValueError):
    """A kernel spec string does not follow the grammar."""

    def __init__(self, message, position=0, expected=()):
        detail = f"{message} (at position {position}"
        if expected:
            detail += ", expected one of: " + ", ".join(expected)
        detail += ")"
        super().__init__(detail)
        self.position = position
        self.expected = tuple(expected)


class ValidationError(GPMemoryError, ValueError):
    """A parameter is out of its admissible range."""
