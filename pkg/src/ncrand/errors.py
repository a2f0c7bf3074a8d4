"""Exception types shared across the package."""


class NcrandError(Exception):
    """Base class for all package errors."""


class ValidationError(NcrandError, ValueError):
    """An input violates a documented precondition."""


class DimensionMismatch(ValidationError):
    pass


class NonConvergence(NcrandError, ArithmeticError):
    """A numerical procedure exhausted its evaluation budget."""
