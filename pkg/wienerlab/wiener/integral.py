# -*- coding: utf-8 -*-
# License: GNU General Public License v3

"""
Wiener-type Integrals

Scales are rescaled to the unit reference s_j = rho_j / rho_0 and delta_j is
taken constant on (s_{j+1}, s_j] (the last interval uses the profile's
scale ratio). With that convention

    int_tau^1 delta(s)^q ds/s = sum_j delta_j^q * log(s_j / max(s_{j+1}, tau))

is exact.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import stats

from wienerlab.capacity.profile import CapacityProfile
from wienerlab.exceptions import PreconditionError
from wienerlab.utils.validators import Validator, validate_or_raise


def normalized_intervals(profile: CapacityProfile) -> list[tuple[float, float]]:
    """(lower, upper] of each scale's interval in unit-reference coordinates"""
    s = [rho / profile.reference_scale for rho in profile.scales]
    ratio = profile.scale_ratio
    lowers = s[1:] + [s[-1] * ratio]
    return list(zip(lowers, s))


def coverage(profile: CapacityProfile) -> float:
    """Smallest admissible lower limit"""
    return normalized_intervals(profile)[-1][0]


def piecewise_integral(profile: CapacityProfile, power: float, tau: float) -> float:
    """int_tau^1 delta(s)^power ds/s for piecewise-constant delta.

    Raises:
        PreconditionError: tau below the profiled range, or a needed scale
            has no delta.
    """
    validate_or_raise(Validator().field("tau", tau).between(0, 1, open_left=True).validate())
    floor = coverage(profile)
    if tau < floor * (1 - 1e-12):
        raise PreconditionError(f"tau={tau:.6g} is below the smallest profiled scale {floor:.6g}; "
                                "no extrapolation", details={"tau": tau, "coverage": floor})
    total = 0.0
    for j, (lower, upper) in enumerate(normalized_intervals(profile)):
        if tau >= upper:
            break
        delta = profile.deltas[j]
        if j in profile.gaps or math.isnan(delta):
            raise PreconditionError(f"scale {profile.scales[j]:.6g} has no delta value",
                                    details={"gap": profile.gaps.get(j)})
        total += delta ** power * math.log(upper / max(lower, tau))
    return total


def wiener_integral(profile: CapacityProfile, q_o: float, tau: float) -> float:
    """int_tau^1 delta(s)^{q_o} ds/s"""
    validate_or_raise(Validator().field("q_o", q_o).positive().validate())
    return piecewise_integral(profile, q_o, tau)


def thickness_integral(profile: CapacityProfile, p: float, tau: float) -> float:
    """p-thickness sum: exponent 1/(p-1) on the capacity ratios"""
    return piecewise_integral(profile, 1.0 / (p - 1), tau)


def cumulative_integrals(profile: CapacityProfile, power: float, taus) -> list[float]:
    return [piecewise_integral(profile, power, float(t)) for t in taus]


def trend_slope(taus, integrals) -> float:
    """Regression slope of the integral against log(1/tau) over the deepest half"""
    x = np.log(1.0 / np.asarray(taus, dtype=float))
    y = np.asarray(integrals, dtype=float)
    half = max(2, len(x) // 2)
    x, y = x[-half:], y[-half:]
    if len(x) < 2 or np.ptp(x) == 0:
        return 0.0
    return float(stats.linregress(x, y).slope)


def is_uniformly_fat(profile: CapacityProfile, floor: float = 1e-3, collapse: float = 0.5) -> bool:
    """gamma_o above ``floor`` and the deep half of the profile not collapsing
    below ``collapse`` times the shallow half's maximum
    """
    resolved = profile.resolved
    if len(resolved) < 2 or profile.gamma_o <= floor:
        return False
    values = [profile.deltas[j] for j in resolved]
    middle = len(values) // 2
    shallow, deep = values[:middle], values[middle:]
    return min(deep) >= collapse * max(shallow)
