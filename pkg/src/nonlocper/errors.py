"""Exception types shared across the library."""


class NonlocError(Exception):
    """Base class for all library errors."""


class DomainError(NonlocError):
    """Input outside the mathematical domain of an operation."""


class IntegrationError(NonlocError):
    """A quadrature failed to converge to the requested tolerance."""


class GridMismatchError(NonlocError):
    """Two objects that must share a grid do not."""


class UnsupportedKernelError(NonlocError):
    """Operation not defined for this kernel family."""


class DegenerateFitError(NonlocError):
    """Too few usable Fourier modes for a decay fit."""


class ProjectionError(NonlocError):
    """Constraint level unreachable by scaling the given function."""


class DivergenceError(NonlocError):
    """Energy descent failed within the iteration budget."""


class HypothesisViolationError(NonlocError):
    """A checked mathematical hypothesis (e.g. evenness of a weight) fails."""


class StepSizeError(NonlocError):
    """A limit parameter (extrapolation step, radius) is numerically unsafe."""
