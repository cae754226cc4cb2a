"""Exception types shared across the package."""


class ArborealError(Exception):
    """Base class for all package errors."""


class ValidationError(ArborealError):
    """Input violates a documented precondition or schema."""


class CapacityError(ValidationError):
    """A hard enumeration / size bound was exceeded."""


class NumericError(ArborealError):
    """A numerical routine failed to converge or degenerated."""


class DegenerateNormalError(NumericError):
    """Gradient below the numeric floor where a unit normal was requested."""


class InconclusiveError(NumericError):
    """Sampled data too sparse or ill-conditioned to decide a predicate."""
