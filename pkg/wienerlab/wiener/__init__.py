# -*- coding: utf-8 -*-
"""Wiener exponents, integrals, moduli and boundary-point classification."""

from wienerlab.wiener.exponent import (
    HarnackParams,
    c1_constant,
    c_constant,
    critical_exponent,
    optimal_r,
    qo_exponent,
)
from wienerlab.wiener.integral import is_uniformly_fat, thickness_integral, trend_slope, wiener_integral
from wienerlab.wiener.report import WienerReport, classify, modulus_and_reference

__all__ = [
    "HarnackParams",
    "WienerReport",
    "c1_constant",
    "c_constant",
    "classify",
    "critical_exponent",
    "is_uniformly_fat",
    "modulus_and_reference",
    "optimal_r",
    "qo_exponent",
    "thickness_integral",
    "trend_slope",
    "wiener_integral",
]
