"""Exception types shared across the package."""
from __future__ import annotations


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ContractError(ValueError):
    """A structural precondition was violated (admissibility, closure, shape)."""


class SolveError(RuntimeError):
    """A linear solve failed or produced an untrustworthy result.

    Carries the parameter point and, when available, a condition number
    estimate so the offending configuration can be reported.
    """

    def __init__(self, message, point=None, cond=None):
        if point is not None:
            message = f"{message} at point {tuple(point)}"
        if cond is not None:
            message = f"{message} (condition estimate {cond:.3e})"
        super().__init__(message)
        self.point = None if point is None else tuple(point)
        self.cond = cond


class SerializationError(ValueError):
    """A serialized artifact is malformed.  ``location`` points at the culprit."""

    def __init__(self, message, location=None):
        if location is not None:
            message = f"{message} (at {location})"
        super().__init__(message)
        self.location = location


class UnsupportedVersionError(SerializationError):
    """A serialized artifact declares a schema version this code cannot read."""


class ConfigError(ValueError):
    """A study configuration failed validation.  Names the offending field."""

    def __init__(self, message, field=None):
        if field is not None:
            message = f"invalid field '{field}': {message}"
        super().__init__(message)
        self.field = field
