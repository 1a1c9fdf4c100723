"""Exception types raised across the package."""

from __future__ import annotations


class GLLabError(Exception):
    """Base class for all package errors."""


class ConfigurationError(GLLabError, ValueError):
    """Invalid construction parameters or run configuration.

    ``problems`` holds every violation found, not just the first.
    """

    def __init__(self, message: str, problems: list[str] | None = None):
        super().__init__(message)
        self.problems = list(problems) if problems else [message]


class ShapeError(GLLabError, ValueError):
    """A field does not live on the grid it is used with."""


class UnderResolvedBoundary(GLLabError):
    """Consecutive boundary samples jump by pi/2 or more in phase."""


class HypothesisError(GLLabError):
    """Boundary data violates the degree-zero hypothesis."""


class SolverError(GLLabError):
    """An iterative solve hit its iteration cap.

    ``history`` is the residual sequence observed before giving up.
    """

    def __init__(self, message: str, history: list[float] | None = None):
        super().__init__(message)
        self.history = list(history) if history else []


class ProjectionSingularity(SolverError):
    """Pointwise modulus collapsed while retracting onto the constraint set."""


class LiftingUnavailable(GLLabError):
    """Modulus drops below 1/2 somewhere, so no phase lifting is attempted."""


class InsufficientData(GLLabError):
    """Too few epsilon levels to classify a sweep."""
