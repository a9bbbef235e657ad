# -*- coding: utf-8 -*-
# License: GNU General Public License v3

"""
Radial Condenser Oracle

For concentric balls the p-capacity reduces to a 1-D problem: the radial
minimizer has flux |u'|^{p-1} s^{N-1} constant, which gives

    cap_p(B_r, B_R) = |S^{N-1}| * I^{1-p},   I = int_r^R s^{-(N-1)/(p-1)} ds.
"""

from __future__ import annotations

import math

from scipy.integrate import quad
from scipy.special import gamma

from wienerlab.exceptions import NumericalError
from wienerlab.utils.validators import Validator, validate_dimension, validate_or_raise


def sphere_area(dim: int) -> float:
    """|S^{N-1}|: 2 in N=1, 2 pi in N=2, 4 pi in N=3"""
    return 2 * math.pi ** (dim / 2) / gamma(dim / 2)


def _radial_integral_closed(dim: int, p: float, r: float, R: float) -> float:
    a = (p - dim) / (p - 1)
    if abs(a) < 1e-14:
        return math.log(R / r)
    return (R ** a - r ** a) / a


def radial_capacity(dim: int, p: float, r: float, R: float, closed_form: bool = False) -> float:
    """Capacity of B_r in B_R by quadrature (or the closed form).

    Raises:
        NumericalError: quadrature and closed form disagree beyond 1e-10.
    """
    validate_or_raise(
        validate_dimension(dim),
        Validator().field("p", p).between(1, float("inf"), open_left=True).validate(),
        Validator().field("r", r).positive().validate(),
        Validator().field("R", R).custom(lambda v: v > r, "R must exceed r").validate(),
    )
    exponent = -(dim - 1) / (p - 1)
    closed = _radial_integral_closed(dim, p, r, R)
    if closed_form:
        integral = closed
    else:
        integral, _ = quad(lambda s: s ** exponent, r, R, epsabs=0.0, epsrel=1e-13, limit=200)
        if abs(integral - closed) > 1e-10 * abs(closed):
            raise NumericalError(f"radial quadrature {integral!r} disagrees with closed form {closed!r}")
    return sphere_area(dim) * integral ** (1 - p)
