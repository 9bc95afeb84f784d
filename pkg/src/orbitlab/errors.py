"""Shared exception types."""


class OrbitLabError(Exception):
    """Base class for domain errors raised by this package."""


class DimensionMismatch(OrbitLabError, ValueError):
    pass


class SingularMatrix(OrbitLabError, ValueError):
    pass


class NotNilpotent(OrbitLabError, ValueError):
    pass


class ConvergenceFailure(OrbitLabError, RuntimeError):
    """An iterative solver did not reach its residual target."""


class BudgetExhausted(OrbitLabError, RuntimeError):
    """A configured work budget (time or nodes) ran out."""
