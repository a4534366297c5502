"""Semantic exceptions shared across the package."""

__all__ = [
    "ExchGraphError",
    "ParameterError",
    "ConfigError",
    "InversionError",
    "QuadratureError",
    "EnumerationBudgetError",
    "NoThresholdError",
]


class ExchGraphError(Exception):
    """Base class for all package-specific failures."""


class ParameterError(ExchGraphError, ValueError):
    """A distribution or operation parameter violates its stated domain."""


class ConfigError(ExchGraphError, ValueError):
    """An ensemble or run configuration is inconsistent or incomplete."""


class InversionError(ExchGraphError, RuntimeError):
    """Numeric CDF inversion failed to bracket or converge."""


class QuadratureError(ExchGraphError, RuntimeError):
    """Adaptive quadrature could not reach the requested tolerance.

    Carries the achieved absolute error estimate so callers can report it.
    """

    def __init__(self, message: str, achieved: float | None = None):
        super().__init__(message)
        self.achieved = achieved


class EnumerationBudgetError(ExchGraphError, RuntimeError):
    """An exact enumeration would exceed the configured work budget."""


class NoThresholdError(ExchGraphError, ValueError):
    """The seed distribution has finite mean, so no dilution threshold exists."""
