# -*- coding: utf-8 -*-
# License: GNU General Public License v3

"""
Validation Utilities for wienerlab

Chainable parameter validation used at the entry of every public operation,
so invalid inputs are rejected with a field-level explanation before any
grid is allocated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Callable

from wienerlab.exceptions import ValidationError as ValidationFailure


@dataclass
class ValidationError:
    """Single validation error"""
    field: str
    message: str
    code: str = "invalid"
    value: Any = None


@dataclass
class ValidationResult:
    """Result of validation"""
    is_valid: bool
    errors: list[ValidationError]

    def raise_if_invalid(self):
        if not self.is_valid:
            error_messages = [f"{e.field}: {e.message}" for e in self.errors]
            raise ValidationFailure(
                "Validation failed: {0}".format("; ".join(error_messages)),
                field=self.errors[0].field,
                errors=error_messages,
            )


class Validator:
    """Chainable field validator"""

    def __init__(self):
        self._errors: list[ValidationError] = []
        self._current_field: str | None = None
        self._current_value: Any = None
        self._skip_remaining = False

    def field(self, name: str, value: Any) -> Validator:
        self._current_field = name
        self._current_value = value
        self._skip_remaining = False
        return self

    def _add_error(self, message: str, code: str = "invalid"):
        self._errors.append(ValidationError(
            field=self._current_field or "unknown",
            message=message,
            code=code,
            value=self._current_value
        ))

    def _number(self) -> float | None:
        try:
            val = float(self._current_value)
        except (ValueError, TypeError):
            self._add_error("Must be a number", "type")
            self._skip_remaining = True
            return None
        if not math.isfinite(val):
            self._add_error("Must be finite", "finite")
            self._skip_remaining = True
            return None
        return val

    def required(self, message: str | None = None) -> Validator:
        if self._skip_remaining:
            return self
        if self._current_value is None or self._current_value == "":
            self._add_error(message or "This field is required", "required")
            self._skip_remaining = True
        return self

    def optional(self) -> Validator:
        if self._current_value is None or self._current_value == "":
            self._skip_remaining = True
        return self

    def between(self, min_val: float, max_val: float, message: str | None = None,
                open_left: bool = False, open_right: bool = False) -> Validator:
        if self._skip_remaining:
            return self
        val = self._number()
        if val is None:
            return self
        low_bad = val <= min_val if open_left else val < min_val
        high_bad = val >= max_val if open_right else val > max_val
        if low_bad or high_bad:
            left = "(" if open_left else "["
            right = ")" if open_right else "]"
            self._add_error(message or f"Must lie in {left}{min_val}, {max_val}{right}", "range")
        return self

    def positive(self, message: str | None = None) -> Validator:
        if self._skip_remaining:
            return self
        val = self._number()
        if val is not None and val <= 0:
            self._add_error(message or "Must be positive", "positive")
        return self

    def non_negative(self, message: str | None = None) -> Validator:
        if self._skip_remaining:
            return self
        val = self._number()
        if val is not None and val < 0:
            self._add_error(message or "Must be non-negative", "non_negative")
        return self

    def at_least(self, bound: float, message: str | None = None) -> Validator:
        if self._skip_remaining:
            return self
        val = self._number()
        if val is not None and val < bound:
            self._add_error(message or f"Must be at least {bound}", "min")
        return self

    def in_list(self, valid_values: list, message: str | None = None) -> Validator:
        if self._skip_remaining:
            return self
        if self._current_value not in valid_values:
            self._add_error(
                message or "Must be one of: {0}".format(", ".join(str(v) for v in valid_values)),
                "choices"
            )
        return self

    def custom(self, validator_func: Callable[[Any], bool], message: str) -> Validator:
        if self._skip_remaining:
            return self
        if not validator_func(self._current_value):
            self._add_error(message, "custom")
        return self

    def validate(self) -> ValidationResult:
        return ValidationResult(
            is_valid=len(self._errors) == 0,
            errors=self._errors.copy()
        )


# Domain-specific validators

def validate_exponent(p: float, upper: float = 2.0, field: str = "p") -> ValidationResult:
    """Singular range 1 < p < upper (upper inclusive only for the critical value)"""
    return (Validator()
        .field(field, p)
        .required()
        .between(1.0, upper, f"p must lie in (1, {upper:.6g})", open_left=True, open_right=upper >= 2.0)
        .validate())


def validate_dimension(dim: int) -> ValidationResult:
    return (Validator()
        .field("dim", dim)
        .required()
        .in_list([1, 2, 3], "Only N = 1, 2, 3 are supported")
        .validate())


def validate_point(point, dim: int, name: str = "x_o") -> ValidationResult:
    v = Validator()
    v.field(name, point).required().custom(
        lambda x: hasattr(x, "__len__") and len(x) == dim,
        f"Expected a point with {dim} coordinates",
    )
    return v.validate()


def validate_or_raise(*results: ValidationResult):
    errors = [e for r in results for e in r.errors]
    ValidationResult(is_valid=not errors, errors=errors).raise_if_invalid()
