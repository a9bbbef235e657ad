# -*- coding: utf-8 -*-
# License: GNU General Public License v3

"""
Harnack Exponents

lambda_r = N(p-2) + r p must be strictly positive. The Wiener exponent is

    q_o = (1 / (p-1)) (1 + d p (r-1) / lambda_r),

with the prototype value d = 1 + lambda_r / (p r (2-p)) unless d is given.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from wienerlab.exceptions import ValidationError
from wienerlab.utils.validators import Validator, validate_dimension, validate_exponent, validate_or_raise

D_MODES = ("prototype", "user")


def critical_exponent(dim: int) -> float:
    """p_* = 2N / (N + 1)"""
    return 2.0 * dim / (dim + 1)


def lambda_r(dim: int, p: float, r: float) -> float:
    return dim * (p - 2) + r * p


def prototype_d(dim: int, p: float, r: float) -> float:
    return 1.0 + lambda_r(dim, p, r) / (p * r * (2 - p))


@dataclass(frozen=True)
class HarnackParams:
    p: float
    dim: int
    r: float
    lambda_r: float
    d: float
    d_mode: str
    q_o: float

    @property
    def conjectured_q_o(self) -> float:
        """1 / (p-1), the d = 0 value"""
        return 1.0 / (self.p - 1)

    @property
    def lambda_1(self) -> float:
        """lambda = N(p-2) + p, the r = 1 exponent of the L1 Harnack estimate"""
        return lambda_r(self.dim, self.p, 1.0)

    def to_dict(self) -> dict:
        return asdict(self)


def _validate_range(p: float, dim: int, allow_supercritical: bool):
    validate_or_raise(validate_dimension(dim))
    upper = 2.0 if allow_supercritical else critical_exponent(dim)
    validate_or_raise(validate_exponent(p, upper=upper))


def qo_exponent(
    p: float,
    dim: int,
    r: float,
    d_mode: str = "prototype",
    d: float | None = None,
    allow_supercritical: bool = False
) -> HarnackParams:
    """Derived Harnack parameters for (p, N, r).

    Raises:
        ValidationError: p outside (1, p_*] (or (1, 2) with
            ``allow_supercritical``), r <= 1, or lambda_r <= 0.
    """
    _validate_range(p, dim, allow_supercritical)
    validate_or_raise(Validator().field("d_mode", d_mode).in_list(list(D_MODES)).validate())
    lam = lambda_r(dim, p, r)
    if lam <= 1e-12:
        raise ValidationError(
            f"lambda_r = N(p-2) + rp must be strictly positive; got {lam:.6g} for r={r:g} "
            f"(need r > {dim * (2 - p) / p:.6g})",
            field="r",
        )
    validate_or_raise(Validator().field("r", r).between(1, float("inf"), "r must exceed 1", open_left=True).validate())
    if d_mode == "prototype":
        d_value = prototype_d(dim, p, r)
    else:
        if d is None:
            raise ValidationError("user d_mode requires a value for d", field="d")
        validate_or_raise(Validator().field("d", d).non_negative().validate())
        d_value = float(d)
    q_o = (1.0 / (p - 1)) * (1.0 + d_value * p * (r - 1) / lam)
    return HarnackParams(float(p), int(dim), float(r), lam, d_value, d_mode, q_o)


def optimal_r(p: float, dim: int, allow_supercritical: bool = False, points: int = 4001) -> float:
    """argmin of q_o (prototype d) over a log grid of admissible r"""
    _validate_range(p, dim, allow_supercritical)
    r_low = max(1.0, dim * (2 - p) / p) * (1 + 1e-3)
    grid = np.geomspace(r_low, r_low * 1e3, points)
    lam = lambda_r(dim, p, grid)
    d = 1.0 + lam / (p * grid * (2 - p))
    q = (1.0 / (p - 1)) * (1.0 + d * p * (grid - 1) / lam)
    return float(grid[int(np.argmin(q))])


def c1_constant(dim: int, p: float, gamma: float) -> float:
    """c_1 = 2^{(N-1)(2-p)} / gamma^{2-p} for a supplied gamma"""
    validate_or_raise(Validator().field("gamma", gamma).positive().validate())
    return 2.0 ** ((dim - 1) * (2 - p)) / gamma ** (2 - p)


def c_constant(c1: float, c2: float) -> float:
    """c = min{c_1, c_2}"""
    return min(c1, c2)
