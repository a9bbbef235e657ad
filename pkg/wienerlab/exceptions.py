# -*- coding: utf-8 -*-
# License: GNU General Public License v3
"""
wienerlab Exception Hierarchy

All custom exceptions inherit from WienerLabError so callers (and the CLI)
can catch the whole family with a single except clause.
"""

from __future__ import annotations

from typing import Any


class WienerLabError(Exception):
    """Base exception for all wienerlab errors.

    Example:
        try:
            run_experiment(cfg)
        except WienerLabError as e:
            report(e.to_dict())
    """

    def __init__(self, message: str, code: str | None = None, details: dict[str, Any] | None = None):
        super().__init__(message)
        self.message = message
        self.code = code
        self.details = details or {}

    def __str__(self) -> str:
        if self.code:
            return f"[{self.code}] {self.message}"
        return self.message

    def to_dict(self) -> dict[str, Any]:
        """Convert exception to dictionary for JSON reports."""
        return {
            "error": self.__class__.__name__,
            "message": self.message,
            "code": self.code,
            "details": self.details,
        }


class ConfigError(WienerLabError):
    """Configuration file could not be parsed or is missing a field.

    Attributes:
        field: Offending field, as ``section.key``
        line: 1-based line number in the config file, when known
    """

    def __init__(self, message: str, field: str | None = None, line: int | None = None):
        location = field or "config"
        if line is not None:
            location = f"{location} (line {line})"
        super().__init__(f"{location}: {message}", code="CONFIG_ERROR", details={"field": field, "line": line})
        self.field = field
        self.line = line


class ValidationError(WienerLabError):
    """Input parameters failed validation.

    Attributes:
        field: Field that failed validation
        errors: List of validation errors
    """

    def __init__(self, message: str, field: str | None = None, errors: list[str] | None = None):
        super().__init__(message, code="VALIDATION_ERROR", details={"field": field, "errors": errors or []})
        self.field = field
        self.errors = errors or []


class GeometryError(WienerLabError):
    """Degenerate geometry descriptor or misplaced point."""

    def __init__(self, message: str, details: dict[str, Any] | None = None):
        super().__init__(message, code="GEOMETRY_ERROR", details=details)


class PreconditionError(WienerLabError):
    """Hypothesis of an operation or check is not met.

    Raised when, e.g., a point is not on the lateral boundary, a scale is
    not resolvable by the grid, or the complement is not uniformly fat.
    """

    def __init__(self, message: str, details: dict[str, Any] | None = None):
        super().__init__(message, code="PRECONDITION", details=details)


class NumericalError(WienerLabError):
    """Base class for iterative solvers that did not converge."""

    pass


class CapacityConvergenceError(NumericalError):
    """Energy minimisation did not converge within the iteration budget.

    Attributes:
        residual: Last relative energy decrease
        iterations: Iterations performed
    """

    def __init__(self, message: str, residual: float, iterations: int):
        super().__init__(message, code="CAPACITY_NONCONVERGENCE",
                         details={"residual": residual, "iterations": iterations})
        self.residual = residual
        self.iterations = iterations


class SolverConvergenceError(NumericalError):
    """Newton iteration of an implicit time step did not converge.

    Attributes:
        residuals: Max-norm residual after each Newton iteration
        dt: Time step that failed
    """

    def __init__(self, message: str, residuals: list[float] | None = None, dt: float | None = None):
        super().__init__(message, code="NEWTON_NONCONVERGENCE",
                         details={"residuals": residuals or [], "dt": dt})
        self.residuals = residuals or []
        self.dt = dt


__all__ = [
    "WienerLabError",
    "ConfigError",
    "ValidationError",
    "GeometryError",
    "PreconditionError",
    "NumericalError",
    "CapacityConvergenceError",
    "SolverConvergenceError",
]
