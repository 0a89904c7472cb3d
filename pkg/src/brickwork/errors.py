"""Exception types shared across the package."""


class BrickworkError(Exception):
    """Base class for all errors raised by this package."""


class InvalidArgument(BrickworkError, ValueError):
    """An argument is outside the domain of the operation."""


class DimensionMismatch(InvalidArgument):
    pass


class NotPositiveError(BrickworkError, ValueError):
    """A matrix expected to be PSD has an eigenvalue below the clipping tolerance."""


class ResourceLimitError(BrickworkError, MemoryError):
    """The requested state would exceed the configured memory budget."""


class QuadratureError(BrickworkError, RuntimeError):
    pass


class StatisticalCheckFailure(BrickworkError, AssertionError):
    """Raised by the CLI in ``--assert`` mode when a Monte Carlo check fails."""
