# -*- coding: utf-8 -*-
# License: GNU General Public License v3

"""
Capacity Ratio Profiles

delta(rho) = cap_p(K_rho(x_o) minus E, K_{a rho}) / cap_p(K_rho, K_{a rho}),
a = annulus_ratio (3/2 by default), sampled on a dyadic sequence of scales.

When the mask carries its descriptor, each scale is resampled on a fresh
condenser grid with a fixed number of cells across K_{a rho}; otherwise the
mask cells inside K_{a rho} are used directly.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from wienerlab.capacity.condenser import CapacitySettings, Condenser, cube_condenser, p_capacity
from wienerlab.exceptions import NumericalError, PreconditionError, WienerLabError
from wienerlab.geometry.cube import Cube
from wienerlab.geometry.domain import DomainMask
from wienerlab.logger import log_action, log_scale_measured
from wienerlab.utils.background import run_ordered
from wienerlab.utils.logging import get_logger
from wienerlab.utils.validators import Validator, validate_point, validate_or_raise

logger = get_logger("wienerlab.capacity.profile")


@dataclass
class DeltaTerms:
    delta: float
    numerator: float
    denominator: float
    residual: float
    cells: int


@dataclass
class CapacityProfile:
    """delta on decreasing scales; gaps hold the error of scales that failed"""
    x_o: tuple[float, ...]
    p: float
    scales: list[float]
    deltas: list[float]
    numerators: list[float] = field(default_factory=list)
    denominators: list[float] = field(default_factory=list)
    residuals: list[float] = field(default_factory=list)
    gaps: dict[int, str] = field(default_factory=dict)
    annulus_ratio: float = 1.5

    def __post_init__(self):
        if len(self.scales) != len(self.deltas):
            raise ValueError("scales and deltas differ in length")
        if any(b >= a for a, b in zip(self.scales, self.scales[1:])):
            raise ValueError("profile scales must be strictly decreasing")
        for d in self.deltas:
            if not math.isnan(d) and not 0.0 <= d <= 1.0:
                raise ValueError(f"delta {d} outside [0, 1]")
        n = len(self.scales)
        for name in ("numerators", "denominators", "residuals"):
            if not getattr(self, name):
                setattr(self, name, [math.nan] * n)

    @property
    def resolved(self) -> list[int]:
        return [j for j in range(len(self.scales)) if j not in self.gaps and not math.isnan(self.deltas[j])]

    @property
    def gamma_o(self) -> float:
        values = [self.deltas[j] for j in self.resolved]
        return float(min(values)) if values else 0.0

    @property
    def rho_bar(self) -> float:
        resolved = self.resolved
        return float(self.scales[resolved[0]]) if resolved else 0.0

    @property
    def reference_scale(self) -> float:
        return float(self.scales[0])

    @property
    def scale_ratio(self) -> float:
        if len(self.scales) < 2:
            return 0.5
        return float(self.scales[1] / self.scales[0])

    def truncated(self, count: int) -> CapacityProfile:
        """First ``count`` scales only"""
        gaps = {j: msg for j, msg in self.gaps.items() if j < count}
        return replace(self, scales=self.scales[:count], deltas=self.deltas[:count],
                       numerators=self.numerators[:count], denominators=self.denominators[:count],
                       residuals=self.residuals[:count], gaps=gaps)

    def to_dict(self) -> dict:
        return {
            "x_o": list(self.x_o),
            "p": self.p,
            "annulus_ratio": self.annulus_ratio,
            "gamma_o": self.gamma_o,
            "rho_bar": self.rho_bar,
            "scales": list(self.scales),
            "deltas": list(self.deltas),
            "gaps": {str(k): v for k, v in self.gaps.items()},
        }

    def to_csv(self, path: str | Path) -> Path:
        path = Path(path)
        with path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["scale", "delta", "numerator_cap", "denominator_cap", "residual"])
            for j, rho in enumerate(self.scales):
                writer.writerow([repr(float(rho)), repr(float(self.deltas[j])), repr(float(self.numerators[j])),
                                 repr(float(self.denominators[j])), repr(float(self.residuals[j]))])
        return path

    @classmethod
    def from_csv(cls, path: str | Path, x_o=(0.0,), p: float = 1.5) -> CapacityProfile:
        scales, deltas, nums, dens, res = [], [], [], [], []
        with Path(path).open(newline="", encoding="utf-8") as fh:
            for row in csv.DictReader(fh):
                scales.append(float(row["scale"]))
                deltas.append(float(row["delta"]))
                nums.append(float(row.get("numerator_cap") or "nan"))
                dens.append(float(row.get("denominator_cap") or "nan"))
                res.append(float(row.get("residual") or "nan"))
        gaps = {j: "missing" for j, d in enumerate(deltas) if math.isnan(d)}
        return cls(tuple(x_o), p, scales, deltas, nums, dens, res, gaps)


def _check_scale(domain: DomainMask, x_o, rho: float, settings: CapacitySettings):
    outer = Cube(tuple(x_o), settings.annulus_ratio * rho)
    if not outer.inside(domain.bounding_cube):
        raise PreconditionError(f"K_{{{settings.annulus_ratio:g} rho}}(x_o) leaves the bounding cube at rho={rho:.6g}",
                                details={"rho": rho})
    if rho < settings.min_cells * domain.h:
        raise PreconditionError(f"scale rho={rho:.6g} is not resolvable: fewer than "
                                f"{settings.min_cells:g} cells across", details={"rho": rho, "h": domain.h})


def _mask_condensers(domain: DomainMask, x_o, rho: float, p: float, settings: CapacitySettings):
    outer = Cube(tuple(x_o), settings.annulus_ratio * rho)
    box = domain.cube_slices(outer)
    sizes = [s.stop - s.start for s in box]
    n = min(sizes)
    box = tuple(slice(s.start, s.start + n) for s in box)
    sub_inside = domain.inside[box]
    axes = [ax[s] for ax, s in zip(domain.axes, box)]
    centre = tuple(float(0.5 * (ax[0] + ax[-1])) for ax in axes)
    grid_cube = Cube(centre, 0.5 * n * domain.h)
    mesh = np.meshgrid(*axes, indexing="ij")
    in_k = np.ones(sub_inside.shape, dtype=bool)
    for m, c in zip(mesh, x_o):
        in_k &= np.abs(m - c) <= rho * (1 + 1e-12)
    return (Condenser(in_k & ~sub_inside, grid_cube, p), Condenser(in_k, grid_cube, p))


def _resampled_condensers(domain: DomainMask, x_o, rho: float, p: float, settings: CapacitySettings):
    descriptor = domain.descriptor
    cells = settings.cells_for(domain.dim)
    numerator = cube_condenser(x_o, rho, p, cells, settings.annulus_ratio,
                               obstacle=lambda pts: ~descriptor.contains(pts))
    denominator = cube_condenser(x_o, rho, p, cells, settings.annulus_ratio)
    return numerator, denominator


def delta_terms(domain: DomainMask, x_o, rho: float, p: float, settings: CapacitySettings | None = None) -> DeltaTerms:
    """Both capacities of the ratio, with the solver residual"""
    settings = (settings or CapacitySettings()).validate()
    validate_or_raise(validate_point(x_o, domain.dim), Validator().field("rho", rho).positive().validate())
    _check_scale(domain, x_o, rho, settings)

    if domain.descriptor is not None:
        numerator, denominator = _resampled_condensers(domain, x_o, rho, p, settings)
    else:
        numerator, denominator = _mask_condensers(domain, x_o, rho, p, settings)

    den = p_capacity(denominator, settings)
    if not numerator.inner.any():
        return DeltaTerms(0.0, 0.0, den.value, den.energy_residual, numerator.shape[0])
    if np.array_equal(numerator.inner, denominator.inner):
        return DeltaTerms(1.0, den.value, den.value, den.energy_residual, numerator.shape[0])
    num = p_capacity(numerator, settings)

    raw = num.value / den.value
    residual = max(num.energy_residual, den.energy_residual)
    if raw > 1.0:
        if raw - 1.0 >= settings.tol:
            raise NumericalError(f"capacity quotient {raw:.12g} exceeds 1 beyond the solver tolerance",
                                 details={"rho": rho, "numerator": num.value, "denominator": den.value})
        raw = 1.0
    log_scale_measured(rho, raw)
    return DeltaTerms(float(raw), num.value, den.value, residual, numerator.shape[0])


def delta_ratio(domain: DomainMask, x_o, rho: float, p: float, settings: CapacitySettings | None = None) -> float:
    """delta(rho) in [0, 1].

    Raises:
        PreconditionError: K_{a rho}(x_o) leaves the bounding cube, or rho
            spans fewer than ``min_cells`` mask cells.
    """
    return delta_terms(domain, x_o, rho, p, settings).delta


def dyadic_scales(rho_0: float, count: int, ratio: float = 0.5) -> list[float]:
    return [rho_0 * ratio ** j for j in range(count)]


def largest_scale(domain: DomainMask, x_o, annulus_ratio: float) -> float:
    """Largest rho with K_{a rho}(x_o) in the bounding cube"""
    room = min(domain.half_edge - abs(x - c) for x, c in zip(x_o, domain.center))
    if room <= 0:
        raise PreconditionError(f"x_o = {tuple(x_o)} is not inside the bounding cube")
    return room / annulus_ratio


@log_action("Capacity profile")
def capacity_profile(
    domain: DomainMask,
    x_o,
    p: float,
    num_scales: int,
    settings: CapacitySettings | None = None,
    rho_0: float | None = None
) -> CapacityProfile:
    """delta at ``num_scales`` scales rho_0 * ratio^j.

    Scales that fail record their error in ``gaps``; gamma_o and rho_bar use
    the remaining ones.
    """
    settings = (settings or CapacitySettings()).validate()
    validate_or_raise(
        validate_point(x_o, domain.dim),
        Validator().field("num_scales", num_scales).at_least(3).validate(),
    )
    top = largest_scale(domain, x_o, settings.annulus_ratio)
    if rho_0 is None:
        rho_0 = top
    elif rho_0 > top * (1 + 1e-12):
        raise PreconditionError(f"largest scale {rho_0:.6g} does not fit the bounding cube (max {top:.6g})")
    scales = dyadic_scales(rho_0, num_scales, settings.scale_ratio)

    def measure(rho: float) -> DeltaTerms | WienerLabError:
        try:
            return delta_terms(domain, x_o, rho, p, settings)
        except WienerLabError as e:
            logger.warning("Scale skipped", rho=rho, error=e.message)
            return e

    outcomes = run_ordered(measure, scales, settings.workers)

    profile = CapacityProfile(tuple(float(v) for v in x_o), p, scales, [math.nan] * len(scales),
                              annulus_ratio=settings.annulus_ratio)
    for j, outcome in enumerate(outcomes):
        if isinstance(outcome, WienerLabError):
            profile.gaps[j] = outcome.message
            continue
        profile.deltas[j] = outcome.delta
        profile.numerators[j] = outcome.numerator
        profile.denominators[j] = outcome.denominator
        profile.residuals[j] = outcome.residual
    logger.info("Capacity profile computed", gamma_o=profile.gamma_o, rho_bar=profile.rho_bar,
                gaps=len(profile.gaps))
    return profile


def thickness_profile(
    domain: DomainMask,
    x_o,
    p: float,
    num_scales: int,
    settings: CapacitySettings | None = None,
    rho_0: float | None = None
) -> CapacityProfile:
    """Capacity ratios cap_p(K_rho minus E, K_{2 rho}) / cap_p(K_rho, K_{2 rho}) used by p-thickness"""
    settings = replace(settings or CapacitySettings(), annulus_ratio=2.0)
    return capacity_profile(domain, x_o, p, num_scales, settings, rho_0)
