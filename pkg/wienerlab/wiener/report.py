# -*- coding: utf-8 -*-
# License: GNU General Public License v3

"""
Wiener Reports

Tabulates the Wiener integral, the modulus omega_bar(rho) = exp(-I(rho)),
the reference radius r_tilde = omega_bar(rho^alpha)^{1/2} and the reference
cylinder K_{2 r_tilde} x [t_o - c omega_o^{2-p} 2 (2 r_tilde)^p, t_o], and
classifies the boundary point from the sampled trend.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from wienerlab.capacity.profile import CapacityProfile
from wienerlab.logger import log_action
from wienerlab.utils.validators import Validator, validate_or_raise
from wienerlab.wiener.exponent import HarnackParams
from wienerlab.wiener.integral import (
    coverage,
    is_uniformly_fat,
    normalized_intervals,
    piecewise_integral,
    thickness_integral,
    trend_slope,
)

CLASSIFICATIONS = ("wiener-point", "p-fat", "inconclusive")


@dataclass
class WienerRow:
    tau: float
    scale: float
    delta: float
    integral: float
    modulus: float
    r_tilde: float
    cylinder_radius: float
    cylinder_duration: float
    thickness: float


@dataclass
class WienerReport:
    profile: CapacityProfile
    q_o: float
    alpha: float
    c: float
    omega_o: float
    p: float
    rows: list[WienerRow] = field(default_factory=list)
    classification: str = "inconclusive"
    slope: float = 0.0
    mean_slope: float = 0.0
    thickness_slope: float = 0.0
    params: HarnackParams | None = None

    def integral(self, tau: float) -> float:
        return piecewise_integral(self.profile, self.q_o, tau)

    def modulus(self, rho: float) -> float:
        """omega_bar(rho) for rho in unit-reference coordinates"""
        return math.exp(-self.integral(rho))

    def r_tilde(self, rho: float) -> float:
        return math.sqrt(self.modulus(rho ** self.alpha))

    @property
    def p_thick(self) -> bool:
        return self.thickness_slope > 0

    def summary(self) -> dict:
        out = {
            "q_o": self.q_o,
            "alpha": self.alpha,
            "c": self.c,
            "omega_o": self.omega_o,
            "classification": self.classification,
            "slopes": {"wiener": self.slope, "wiener_mean": self.mean_slope, "thickness": self.thickness_slope},
            "p_thick_trend": self.p_thick,
            "gamma_o": self.profile.gamma_o,
            "rho_bar": self.profile.rho_bar,
        }
        if self.params is not None:
            out.update({"r": self.params.r, "d": self.params.d, "d_mode": self.params.d_mode,
                        "lambda_r": self.params.lambda_r})
        return out

    def to_csv(self, path: str | Path) -> Path:
        path = Path(path)
        with path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["scale", "delta", "integral", "modulus", "r_tilde", "cylinder_radius",
                             "cylinder_duration", "thickness_integral"])
            for row in self.rows:
                writer.writerow([repr(row.scale), repr(row.delta), repr(row.integral), repr(row.modulus),
                                 repr(row.r_tilde), repr(row.cylinder_radius), repr(row.cylinder_duration),
                                 repr(row.thickness)])
        return path

    def to_json(self, path: str | Path) -> Path:
        path = Path(path)
        path.write_text(json.dumps(self.summary(), indent=2, sort_keys=True), encoding="utf-8")
        return path


def classify(profile: CapacityProfile, slope: float, mean_slope: float, fat_floor: float = 1e-3,
             collapse: float = 0.5, slope_fraction: float = 0.1) -> str:
    """p-fat before wiener-point: a fat profile also has a growing integral.

    The deep slope must reach ``slope_fraction`` of the mean slope over the
    whole profile; a smaller one reads as a convergent tail (e.g. geometric
    decay of delta) and stays inconclusive.
    """
    if is_uniformly_fat(profile, fat_floor, collapse):
        return "p-fat"
    if mean_slope > 0 and slope >= slope_fraction * mean_slope:
        return "wiener-point"
    return "inconclusive"


@log_action("Wiener report")
def modulus_and_reference(
    profile: CapacityProfile,
    q_o: float | HarnackParams,
    alpha: float = 1.0,
    c: float = 0.1,
    omega_o: float = 1.0,
    p: float | None = None,
    fat_floor: float = 1e-3,
    collapse: float = 0.5,
    slope_fraction: float = 0.1
) -> WienerReport:
    """Tabulate modulus, reference radius and cylinder at every profiled scale.

    Rows are taken at the scale tops s_j and at the deepest covered point;
    radii are in the profile's length units (unit reference = rho_0).
    """
    params = q_o if isinstance(q_o, HarnackParams) else None
    q_value = params.q_o if params else float(q_o)
    p_value = p if p is not None else (params.p if params else profile.p)
    validate_or_raise(
        Validator().field("alpha", alpha).between(0, 1, open_left=True).validate(),
        Validator().field("c", c).positive().validate(),
        Validator().field("omega_o", omega_o).positive().validate(),
        Validator().field("q_o", q_value).positive().validate(),
    )

    report = WienerReport(profile, q_value, float(alpha), float(c), float(omega_o), float(p_value),
                          params=params)
    intervals = normalized_intervals(profile)
    resolved_depth = len(intervals)
    for j in range(len(intervals)):
        if j in profile.gaps or math.isnan(profile.deltas[j]):
            resolved_depth = j
            break
    if resolved_depth == 0:
        return report

    taus = [upper for _, upper in intervals[:resolved_depth]]
    taus.append(intervals[resolved_depth - 1][0])
    rho_0 = profile.reference_scale
    floor = coverage(profile) if resolved_depth == len(intervals) else intervals[resolved_depth - 1][0]

    integrals = []
    thickness = []
    for j, tau in enumerate(taus):
        integral = piecewise_integral(profile, q_value, tau)
        modulus = math.exp(-integral)
        inner = tau ** alpha
        r_tilde = math.sqrt(math.exp(-piecewise_integral(profile, q_value, inner))) if inner >= floor else math.nan
        radius = 2 * r_tilde * rho_0
        duration = c * omega_o ** (2 - p_value) * 2 * radius ** p_value
        delta = profile.deltas[min(j, resolved_depth - 1)]
        thick = thickness_integral(profile, p_value, tau)
        report.rows.append(WienerRow(tau, tau * rho_0, delta, integral, modulus, r_tilde, radius, duration, thick))
        integrals.append(integral)
        thickness.append(thick)

    report.slope = trend_slope(taus[1:], integrals[1:]) if len(taus) > 2 else 0.0
    report.thickness_slope = trend_slope(taus[1:], thickness[1:]) if len(taus) > 2 else 0.0
    report.mean_slope = integrals[-1] / math.log(1.0 / taus[-1])
    report.classification = classify(profile.truncated(resolved_depth), report.slope, report.mean_slope, fat_floor,
                                     collapse, slope_fraction)
    return report
