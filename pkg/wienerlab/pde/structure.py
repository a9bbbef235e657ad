# -*- coding: utf-8 -*-
# License: GNU General Public License v3

"""
Structure Data and Flux Models

Two flux models are implemented:

* ``prototype``: A(xi) = |xi|^{p-2} xi, with C_o = C_1 = 1;
* ``diagonal-matrix``: A_k = a_k(x) |xi|^{p-2} xi_k with
  a_k(x) = base_k (1 + m sin(pi x_1)), |m| < 1.

Cells outside E use the prototype flux.

Config section ``[model]``::

    kind = diagonal-matrix
    p = 1.3333333333
    coefficients = 1.0, 2.0
    modulation = 0.25
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from wienerlab.utils.config import ConfigDocument
from wienerlab.utils.validators import Validator, validate_dimension, validate_exponent, validate_or_raise
from wienerlab.wiener.exponent import critical_exponent

MODEL_KINDS = ("prototype", "diagonal-matrix")


@dataclass(frozen=True)
class StructureParams:
    """{p, N, C_o, C_1, Lambda} with p_* = 2N/(N+1)"""
    p: float
    dim: int
    C_o: float = 1.0
    C_1: float = 1.0
    Lambda: float = 0.0

    def __post_init__(self):
        validate_or_raise(
            validate_exponent(self.p),
            validate_dimension(self.dim),
            Validator().field("C_o", self.C_o).positive().validate(),
            Validator().field("C_1", self.C_1).positive()
                .custom(lambda v: v >= self.C_o, "C_1 must be at least C_o").validate(),
            Validator().field("Lambda", self.Lambda).non_negative().validate(),
        )

    @property
    def p_star(self) -> float:
        return critical_exponent(self.dim)

    @property
    def subcritical(self) -> bool:
        return self.p <= self.p_star + 1e-12

    @property
    def regime(self) -> str:
        return "sub-critical" if self.subcritical else "super-critical"

    def to_dict(self) -> dict:
        return {"p": self.p, "N": self.dim, "C_o": self.C_o, "C_1": self.C_1, "Lambda": self.Lambda,
                "p_star": self.p_star, "regime": self.regime}


@dataclass(frozen=True)
class FluxModel:
    p: float
    dim: int
    kind: str = "prototype"
    coefficients: tuple[float, ...] = field(default_factory=tuple)
    modulation: float = 0.0

    def __post_init__(self):
        validate_or_raise(
            validate_exponent(self.p),
            validate_dimension(self.dim),
            Validator().field("kind", self.kind).in_list(list(MODEL_KINDS)).validate(),
            Validator().field("modulation", self.modulation)
                .between(-1, 1, open_left=True, open_right=True).validate(),
        )
        if self.kind == "diagonal-matrix":
            coeffs = self.coefficients or (1.0,) * self.dim
            validate_or_raise(
                Validator().field("coefficients", coeffs)
                    .custom(lambda c: len(c) == self.dim and min(c) > 0,
                            f"expected {self.dim} positive coefficients").validate()
            )
            object.__setattr__(self, "coefficients", tuple(float(c) for c in coeffs))

    @property
    def is_prototype(self) -> bool:
        return self.kind == "prototype"

    def structure(self) -> StructureParams:
        """Ellipticity bounds of the model as structure constants"""
        if self.is_prototype:
            return StructureParams(self.p, self.dim)
        m = abs(self.modulation)
        return StructureParams(self.p, self.dim, min(self.coefficients) * (1 - m), max(self.coefficients) * (1 + m))

    def coefficient_fields(self, points: np.ndarray, inside: np.ndarray, shape: tuple[int, ...]) -> list[np.ndarray] | None:
        """a_k on every cell (1 outside E); None for the prototype"""
        if self.is_prototype:
            return None
        factor = 1.0 + self.modulation * np.sin(math.pi * points[:, 0])
        fields = []
        for base in self.coefficients:
            values = (base * factor).reshape(shape)
            fields.append(np.where(inside, values, 1.0))
        return fields

    def describe(self) -> dict:
        return {"kind": self.kind, "p": self.p, "N": self.dim, "coefficients": list(self.coefficients),
                "modulation": self.modulation}

    @classmethod
    def from_config(cls, doc: ConfigDocument, dim: int, section: str = "model") -> FluxModel:
        kind = doc.get_str(section, "kind", "prototype").lower()
        coefficients = doc.get_floats(section, "coefficients", ()) if kind == "diagonal-matrix" else ()
        return cls(
            p=doc.get_float(section, "p"),
            dim=dim,
            kind=kind,
            coefficients=coefficients,
            modulation=doc.get_float(section, "modulation", 0.0),
        )
