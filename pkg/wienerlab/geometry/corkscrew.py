# -*- coding: utf-8 -*-
# License: GNU General Public License v3

"""
Outer Corkscrew Check

At each radius r, look for a complement cell a_r with r/M < |a_r - x_o| < r
and dist(a_r, E) > r/M. Distances come from the exact Euclidean distance
transform of the complement.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from wienerlab.exceptions import GeometryError
from wienerlab.geometry.domain import DomainMask, is_boundary_point
from wienerlab.logger import log_action
from wienerlab.utils.validators import Validator, validate_or_raise, validate_point

MIN_RESOLVED_CELLS = 2.0


@dataclass
class CorkscrewScale:
    radius: float
    passed: bool
    resolvable: bool
    witness: tuple[float, ...] | None = None
    clearance: float = 0.0


@dataclass
class CorkscrewReport:
    x_o: tuple[float, ...]
    M: float
    r_o: float
    on_boundary: bool
    scales: list[CorkscrewScale] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        resolved = [s for s in self.scales if s.resolvable]
        return bool(resolved) and all(s.passed for s in resolved)

    def to_dict(self) -> dict:
        return {
            "x_o": list(self.x_o),
            "M": self.M,
            "r_o": self.r_o,
            "on_boundary": self.on_boundary,
            "passed": self.passed,
            "scales": [
                {"radius": s.radius, "passed": s.passed, "resolvable": s.resolvable,
                 "witness": list(s.witness) if s.witness else None, "clearance": s.clearance}
                for s in self.scales
            ],
        }


def complement_clearance(domain: DomainMask) -> np.ndarray:
    """Distance from each complement cell centre to E (zero on E).

    The transform measures centre-to-centre distance to the nearest E cell;
    the interface sits half a cell closer.
    """
    dist = ndimage.distance_transform_edt(~domain.inside, sampling=domain.h)
    return np.where(domain.inside, 0.0, np.maximum(dist - 0.5 * domain.h, 0.0))


@log_action("Corkscrew check")
def corkscrew_check(
    domain: DomainMask,
    x_o,
    M: float,
    r_o: float,
    scales,
    strict: bool = True
) -> CorkscrewReport:
    """Per-radius corkscrew witnesses.

    A radius is resolvable when r/M spans at least two cells. With
    ``strict`` (the default) a point off the discrete boundary is rejected;
    otherwise every scale is evaluated and simply fails where no
    complement is nearby.

    Raises:
        GeometryError: x_o not on the discrete boundary (strict mode).
    """
    validate_or_raise(
        validate_point(x_o, domain.dim),
        Validator().field("M", M).at_least(2.0).validate(),
        Validator().field("r_o", r_o).positive().validate(),
    )
    for r in scales:
        if not 0 < r < r_o:
            raise GeometryError(f"scale {r} outside (0, r_o = {r_o})")

    on_boundary = is_boundary_point(domain, x_o)
    if strict and not on_boundary:
        raise GeometryError(f"x_o = {tuple(x_o)} is not on the discrete boundary of E")

    clearance = complement_clearance(domain)
    points = domain.points()
    dist = np.linalg.norm(points - np.asarray(x_o, dtype=float), axis=1).reshape(domain.shape)

    report = CorkscrewReport(tuple(float(v) for v in x_o), float(M), float(r_o), on_boundary)
    for r in sorted(scales, reverse=True):
        resolvable = r / M >= MIN_RESOLVED_CELLS * domain.h
        annulus = (~domain.inside) & (dist > r / M) & (dist < r)
        if not annulus.any():
            report.scales.append(CorkscrewScale(float(r), False, resolvable))
            continue
        best = np.where(annulus, clearance, -np.inf)
        flat = int(np.argmax(best))
        value = float(best.ravel()[flat])
        witness = tuple(float(v) for v in points[flat])
        report.scales.append(CorkscrewScale(float(r), value > r / M, resolvable, witness, value))
    return report
