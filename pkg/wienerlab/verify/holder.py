# -*- coding: utf-8 -*-
# License: GNU General Public License v3

"""
Holder Decay at p-Fat Boundaries

When the complement is uniformly p-fat and g is Holder, the oscillation over
the intrinsic cylinders shrinks like C rho^alpha. The check fits alpha on the
measured oscillations and, per scale, the measure-density fraction sigma of
the truncated super-solution.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from wienerlab import __version__
from wienerlab.capacity.profile import CapacityProfile, capacity_profile
from wienerlab.exceptions import PreconditionError
from wienerlab.geometry.cube import Cube, Cylinder, intrinsic_cylinder
from wienerlab.geometry.domain import is_boundary_point
from wienerlab.logger import log_experiment
from wienerlab.pde.truncation import lateral_extremes
from wienerlab.utils.logging import get_logger, log_context
from wienerlab.utils.metrics import record_check
from wienerlab.verify.decay import aligned_horizon, measure_oscillations, reference_oscillation, solve_experiment
from wienerlab.verify.experiment import ExperimentConfig, validate_experiment
from wienerlab.verify.fitting import LinearFit, fit_line
from wienerlab.verify.harnack import MeasureDensityReport, check_measure_density
from wienerlab.wiener.integral import is_uniformly_fat

logger = get_logger("wienerlab.verify.holder")


@dataclass
class HolderReport:
    x_o: tuple[float, ...]
    profile: CapacityProfile
    datum_exponent: float
    omega_o: float
    scales: list[float]
    omegas: list[float]
    fit: LinearFit | None = None
    density: list[MeasureDensityReport] = field(default_factory=list)
    correlation_threshold: float = 0.9
    working_cube: dict = field(default_factory=dict)
    config: dict = field(default_factory=dict)

    @property
    def alpha_fit(self) -> float:
        return self.fit.slope if self.fit else math.nan

    @property
    def passed(self) -> bool:
        return self.fit is not None and self.fit.slope > 0 and self.fit.correlation >= self.correlation_threshold

    @property
    def density_passed(self) -> bool | None:
        if not self.density:
            return None
        return all(d.passed for d in self.density)

    def summary(self) -> dict:
        return {
            "passed": self.passed,
            "alpha_fit": self.alpha_fit,
            "fit": self.fit.to_dict() if self.fit else None,
            "datum_exponent": self.datum_exponent,
            "gamma_o": self.profile.gamma_o,
            "omega_o": self.omega_o,
            "measure_density": {"passed": self.density_passed, "rows": [d.to_dict() for d in self.density]},
            "working_cube": self.working_cube,
            "version": __version__,
            "config": self.config,
        }

    def to_csv(self, path: str | Path) -> Path:
        path = Path(path)
        sigmas = {d.rho: d.sigma_fit for d in self.density}
        with path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["scale", "delta", "omega", "sigma_fit"])
            for j, rho in enumerate(self.scales):
                writer.writerow([repr(rho), repr(self.profile.deltas[j]), repr(self.omegas[j]),
                                 repr(sigmas.get(rho, math.nan))])
        return path

    def to_json(self, path: str | Path) -> Path:
        path = Path(path)
        path.write_text(json.dumps(self.summary(), indent=2, sort_keys=True, default=str), encoding="utf-8")
        return path


@log_experiment("p-fat Holder decay")
def check_pfat_holder(cfg: ExperimentConfig) -> HolderReport:
    """Fit omega(rho) ~ C rho^alpha at a boundary point of a p-fat complement.

    Raises:
        PreconditionError: the profile is not uniformly fat, g records no
            Holder exponent, or x_o is not a boundary point.
    """
    validate_experiment(cfg)
    if not is_boundary_point(cfg.domain, cfg.x_o):
        raise PreconditionError(f"x_o = {tuple(cfg.x_o)} is not a lateral boundary point")
    datum = cfg.domain.datum
    if datum.holder_exponent is None:
        raise PreconditionError(f"datum {datum.kind!r} records no Holder exponent")
    criteria = cfg.criteria

    with log_context(check="pfat_holder", p=cfg.p):
        profile = capacity_profile(cfg.domain, cfg.x_o, cfg.p, cfg.num_scales, cfg.capacity, rho_0=cfg.base_scale)
        if not is_uniformly_fat(profile, criteria.fat_floor, criteria.fat_collapse):
            raise PreconditionError(f"complement is not uniformly p-fat (gamma_o = {profile.gamma_o:.3g})",
                                    details={"gamma_o": profile.gamma_o, "deltas": profile.deltas})

        traj = solve_experiment(cfg, aligned_horizon(cfg.T, cfg.solver))
        omega_o = reference_oscillation(traj, cfg)
        scales = cfg.scales()
        omegas = measure_oscillations(traj, cfg.x_o, cfg.t_o, scales, omega_o, cfg.c, cfg.p)
        usable = [(rho, w) for rho, w in zip(scales, omegas) if w > 0]
        fit = fit_line([math.log(r) for r, _ in usable], [math.log(w) for _, w in usable])

        report = HolderReport(tuple(cfg.x_o), profile, float(datum.holder_exponent), omega_o, scales, omegas, fit,
                              correlation_threshold=criteria.correlation, working_cube=cfg.working_cube(),
                              config=cfg.snapshot)
        for rho in scales:
            window = intrinsic_cylinder(cfg.x_o, cfg.t_o, rho, omega_o, cfg.c, cfg.p)
            cylinder = Cylinder(Cube(tuple(cfg.x_o), 2 * rho), window.t_end, window.duration)
            try:
                k = lateral_extremes(traj, cylinder)[1]
                report.density.append(check_measure_density(traj, cfg.x_o, rho, k, window.t_start, window.t_end))
            except PreconditionError as e:
                logger.warning("Measure density skipped", rho=rho, error=e.message)

        logger.check_event("pfat_holder", report.passed, alpha_fit=report.alpha_fit,
                           density=report.density_passed)
        record_check("pfat_holder", report.passed)
    return report
