"""Exception types shared across the package."""


class StoplightError(Exception):
    """Base class for all package errors."""


class ValidationError(StoplightError, ValueError):
    """Input parameters violate a model constraint."""


class NumericFailure(StoplightError, ArithmeticError):
    """A numeric procedure failed (singular system, bad root count, ...)."""


class TruncationError(StoplightError):
    """An exact computation would have to drop probability mass."""


class ResourceLimitError(StoplightError):
    """The requested state space is larger than the configured limit."""


class SeriesMismatch(StoplightError, AssertionError):
    """Two independent series evaluations disagree."""
