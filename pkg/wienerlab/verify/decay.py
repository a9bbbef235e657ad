# -*- coding: utf-8 -*-
# License: GNU General Public License v3

"""
Boundary Decay Verification

Solves the Cauchy-Dirichlet problem once and checks, scale by scale, that
the oscillation over the intrinsic cylinders Q_rho(omega_o) decays like

    omega_o exp(-gamma I(rho^alpha)) + 2 osc g,   I(tau) = int_tau^1 delta(s)^{q_o} ds/s.

gamma, c and alpha are fitted, never asserted. A run passes when the fit of
ln omega_j against I_j has gamma_fit > 0 and |correlation| above the
criterion for every swept c.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from wienerlab import __version__
from wienerlab.capacity.profile import CapacityProfile, capacity_profile
from wienerlab.exceptions import PreconditionError, WienerLabError
from wienerlab.geometry.cube import Cube, Cylinder, intrinsic_cylinder, working_cylinder
from wienerlab.geometry.domain import is_boundary_point
from wienerlab.logger import log_experiment, log_scale_measured
from wienerlab.pde.solver import SolverSettings, solve_cauchy_dirichlet, time_grid
from wienerlab.pde.trajectory import Trajectory, ess_osc
from wienerlab.pde.truncation import lateral_extremes
from wienerlab.utils.config import ConfigValidationResult
from wienerlab.utils.logging import get_logger, log_context
from wienerlab.utils.metrics import record_check
from wienerlab.verify.experiment import ExperimentConfig, validate_experiment
from wienerlab.verify.fitting import LinearFit, RefinementResult, fit_line, refinement_check
from wienerlab.wiener.exponent import HarnackParams
from wienerlab.wiener.integral import piecewise_integral
from wienerlab.wiener.report import WienerReport, modulus_and_reference

logger = get_logger("wienerlab.verify.decay")

STATUSES = ("pass", "fail", "insufficient-resolution")


@dataclass
class DecayRow:
    scale: float
    delta: float
    tau: float
    integral: float
    omega: float
    omegas: dict[float, float] = field(default_factory=dict)
    conjectured_integral: float = math.nan
    osc_g: float = math.nan
    rhs: float = math.nan
    residual: float = math.nan
    backward: float = math.nan
    centered: float = math.nan
    resolvable: bool = True

    def to_dict(self) -> dict:
        out = {k: v for k, v in self.__dict__.items() if k != "omegas"}
        out["omegas"] = {repr(c): w for c, w in self.omegas.items()}
        return out


@dataclass
class VerifierReport:
    x_o: tuple[float, ...]
    t_o: float
    params: HarnackParams
    omega_o: float
    rows: list[DecayRow] = field(default_factory=list)
    fits: dict[float, LinearFit | None] = field(default_factory=dict)
    gamma_fit: float = math.nan
    correlation: float = 0.0
    c_fit: float | None = None
    alpha_fit: LinearFit | None = None
    conjectured: LinearFit | None = None
    wiener: WienerReport | None = None
    backward_consistent: bool | None = None
    future_identical: bool | None = None
    refinement: RefinementResult | None = None
    status: str = "fail"
    warnings: list[dict] = field(default_factory=list)
    working_cube: dict = field(default_factory=dict)
    config: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    @property
    def resolvable_scales(self) -> int:
        return sum(1 for row in self.rows if row.resolvable)

    @property
    def checks(self) -> dict[str, bool | None]:
        return {
            "decay_fit": self.passed,
            "backward_consistency": self.backward_consistent,
            "future_independence": self.future_identical,
            "refinement": self.refinement.stable if self.refinement else None,
        }

    def anchored(self) -> np.ndarray:
        return anchored_values(self.omega_o, self.rows)

    def summary(self) -> dict:
        out = {
            "status": self.status,
            "passed": self.passed,
            "x_o": list(self.x_o),
            "t_o": self.t_o,
            "harnack": self.params.to_dict(),
            "omega_o": self.omega_o,
            "gamma_fit": self.gamma_fit,
            "correlation": self.correlation,
            "c_fit": self.c_fit,
            "fits": {repr(c): fit.to_dict() if fit else None for c, fit in self.fits.items()},
            "alpha_fit": self.alpha_fit.to_dict() if self.alpha_fit else None,
            "conjectured_q_o": {
                "q_o": self.params.conjectured_q_o,
                "fit": self.conjectured.to_dict() if self.conjectured else None,
            },
            "resolvable_scales": self.resolvable_scales,
            "checks": self.checks,
            "warnings": self.warnings,
            "working_cube": self.working_cube,
            "version": __version__,
            "config": self.config,
        }
        if self.wiener is not None:
            out["wiener"] = self.wiener.summary()
        if self.refinement is not None:
            out["refinement"] = self.refinement.to_dict()
        return out

    def to_csv(self, path: str | Path) -> Path:
        path = Path(path)
        sweep = sorted({c for row in self.rows for c in row.omegas})
        with path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["scale", "delta", "tau", "wiener_integral", "omega"]
                            + [f"omega_c{c:g}" for c in sweep]
                            + ["conjectured_integral", "osc_g", "bound_rhs", "residual", "omega_backward",
                               "omega_centered", "resolvable"])
            for row in self.rows:
                writer.writerow([repr(row.scale), repr(row.delta), repr(row.tau), repr(row.integral),
                                 repr(row.omega)]
                                + [repr(row.omegas.get(c, math.nan)) for c in sweep]
                                + [repr(row.conjectured_integral), repr(row.osc_g), repr(row.rhs),
                                   repr(row.residual), repr(row.backward), repr(row.centered),
                                   int(row.resolvable)])
        return path

    def to_json(self, path: str | Path) -> Path:
        path = Path(path)
        path.write_text(json.dumps(self.summary(), indent=2, sort_keys=True, default=str), encoding="utf-8")
        return path


def aligned_horizon(T: float, settings: SolverSettings) -> float:
    """First step end at or after T, so a longer run shares every stored field"""
    if settings.dt_growth == 1.0 and settings.dt_max is None:
        return math.ceil(T / settings.dt - 1e-9) * settings.dt
    grid = time_grid(2 * T + settings.dt, settings)
    return next(t for t in grid if t >= T - 1e-12)


def anchored_values(omega_o: float, rows: list[DecayRow]) -> np.ndarray:
    """Quantities measured at or before t_o, flattened"""
    values = [omega_o]
    for row in rows:
        values.extend(row.omegas[c] for c in sorted(row.omegas))
        values.extend((row.osc_g, row.backward))
    return np.asarray(values, dtype=float)


def measure_oscillations(traj: Trajectory, x_o, t_o: float, scales, omega_o: float, c: float,
                         p: float) -> list[float]:
    """ess osc over Q_rho(omega_o) for every scale; nan when the cylinder holds no cell of E"""
    out = []
    for rho in scales:
        try:
            out.append(ess_osc(traj, intrinsic_cylinder(x_o, t_o, rho, omega_o, c, p))[2])
        except PreconditionError:
            out.append(math.nan)
    return out


def datum_oscillation(traj: Trajectory, cylinder: Cylinder) -> float:
    """osc of the lateral data over the cylinder; 0 when it meets no complement cell"""
    try:
        low, high = lateral_extremes(traj, cylinder)
    except PreconditionError:
        return 0.0
    return high - low


def reference_oscillation(traj: Trajectory, cfg: ExperimentConfig) -> float:
    cyl = working_cylinder(cfg.x_o, cfg.t_o, cfg.R_o, cfg.p, factor=2.0)
    omega_o = ess_osc(traj, cyl)[2]
    if omega_o <= 0:
        raise PreconditionError("omega_o = 0: the solution is constant on Q_{R_o}; nothing to decay",
                                details={"R_o": cfg.R_o})
    return omega_o


def _anchored_rows(traj: Trajectory, cfg: ExperimentConfig, scales: list[float], omega_o: float,
                   sweep: tuple[float, ...]) -> list[DecayRow]:
    rows = [DecayRow(rho, math.nan, math.nan, math.nan, math.nan) for rho in scales]
    for c in sweep:
        for row, omega in zip(rows, measure_oscillations(traj, cfg.x_o, cfg.t_o, scales, omega_o, c, cfg.p)):
            row.omegas[c] = omega
    theta = cfg.c * omega_o ** (2 - cfg.p)
    for row in rows:
        row.omega = row.omegas[cfg.c]
        backward = Cylinder(Cube(cfg.x_o, 2 * row.scale), cfg.t_o, 2 * theta * row.scale ** cfg.p)
        try:
            row.backward = ess_osc(traj, backward)[2]
        except PreconditionError:
            pass
    return rows


def _centered(traj: Trajectory, cfg: ExperimentConfig, rows: list[DecayRow], omega_o: float):
    theta = cfg.c * omega_o ** (2 - cfg.p)
    for row in rows:
        half = theta * row.scale ** cfg.p
        if cfg.t_o + half > traj.t_final + 1e-12:
            continue
        try:
            row.centered = ess_osc(traj, Cylinder(Cube(cfg.x_o, 2 * row.scale), cfg.t_o + half, 2 * half))[2]
        except PreconditionError:
            pass


def _integrals(profile: CapacityProfile, rows: list[DecayRow], q_o: float, conjectured: float, alpha: float):
    rho_0 = profile.reference_scale
    for j, row in enumerate(rows):
        row.delta = profile.deltas[j]
        row.tau = (row.scale / rho_0) ** alpha
        try:
            row.integral = piecewise_integral(profile, q_o, row.tau)
            row.conjectured_integral = piecewise_integral(profile, conjectured, row.tau)
        except PreconditionError:
            row.resolvable = False
        if j in profile.gaps or not (row.omega > 0):
            row.resolvable = False


def _fit(rows: list[DecayRow], omega_of, integral_of) -> LinearFit | None:
    usable = [r for r in rows if r.resolvable and omega_of(r) > 0]
    return fit_line([integral_of(r) for r in usable], [math.log(omega_of(r)) for r in usable])


def _passes(fit: LinearFit | None, threshold: float) -> bool:
    return fit is not None and -fit.slope > 0 and abs(fit.correlation) >= threshold


def solve_experiment(cfg: ExperimentConfig, horizon: float) -> Trajectory:
    return solve_cauchy_dirichlet(cfg.domain, cfg.model, cfg.domain.datum, horizon, cfg.solver)


@log_experiment("Boundary decay")
def verify_boundary_decay(cfg: ExperimentConfig, validation: ConfigValidationResult | None = None) -> VerifierReport:
    """Fit the decay constants at (x_o, t_o).

    Raises:
        ConfigError: the experiment violates a blocking invariant.
        PreconditionError: x_o is not a lateral boundary point, or omega_o = 0.
    """
    validation = validation or validate_experiment(cfg)
    if not is_boundary_point(cfg.domain, cfg.x_o):
        raise PreconditionError(f"x_o = {tuple(cfg.x_o)} is not a lateral boundary point",
                                details={"x_o": list(cfg.x_o)})
    params = cfg.harnack_params()
    criteria = cfg.criteria
    sweep = tuple(sorted(set(criteria.c_sweep) | {cfg.c}))

    with log_context(check="boundary_decay", p=cfg.p, dim=cfg.dim):
        horizon = aligned_horizon(max(cfg.T, cfg.t_o), cfg.solver)
        traj = solve_experiment(cfg, horizon)
        omega_o = reference_oscillation(traj, cfg)
        scales = cfg.scales()
        rows = _anchored_rows(traj, cfg, scales, omega_o, sweep)
        _centered(traj, cfg, rows, omega_o)

        profile = capacity_profile(cfg.domain, cfg.x_o, cfg.p, cfg.num_scales, cfg.capacity, rho_0=cfg.base_scale)
        _integrals(profile, rows, params.q_o, params.conjectured_q_o, cfg.alpha)
        wiener = modulus_and_reference(profile, params, cfg.alpha, cfg.c, omega_o, cfg.p,
                                       criteria.fat_floor, criteria.fat_collapse, criteria.slope_fraction)

        report = VerifierReport(tuple(cfg.x_o), cfg.t_o, params, omega_o, rows, wiener=wiener,
                                warnings=[{"field": i.field, "message": i.message}
                                          for i in validation.get_warnings()],
                                working_cube=cfg.working_cube(), config=cfg.snapshot)
        for row in rows:
            log_scale_measured(row.scale, row.delta, row.omega)

        if report.resolvable_scales < criteria.min_scales:
            report.status = "insufficient-resolution"
            logger.warning("Too few resolvable scales", resolvable=report.resolvable_scales,
                           required=criteria.min_scales)
            record_check("boundary_decay", False)
            return report

        for c in sweep:
            report.fits[c] = _fit(rows, lambda r, c=c: r.omegas[c], lambda r: r.integral)
        main = report.fits[cfg.c]
        if main is not None:
            report.gamma_fit = -main.slope
            report.correlation = main.correlation
        passing = [c for c in sweep if _passes(report.fits[c], criteria.correlation)]
        report.c_fit = max(passing) if passing else None
        report.alpha_fit = fit_line([math.log(r.scale) for r in rows if r.resolvable],
                                    [math.log(r.omega) for r in rows if r.resolvable])
        report.conjectured = _fit(rows, lambda r: r.omega, lambda r: r.conjectured_integral)

        _bound_column(report, traj, cfg)
        _backward_consistency(report, criteria.backward_tolerance)
        if cfg.future_check:
            extended = solve_experiment(cfg, aligned_horizon(horizon + cfg.future_extension, cfg.solver))
            extended_omega_o = reference_oscillation(extended, cfg)
            again = _anchored_rows(extended, cfg, scales, extended_omega_o, sweep)
            _bound_osc(again, extended, cfg, wiener)
            report.future_identical = bool(np.array_equal(report.anchored(), anchored_values(extended_omega_o, again),
                                                          equal_nan=True))
            if not report.future_identical:
                logger.warning("t_o-anchored quantities changed when the run was extended")

        report.status = "pass" if len(passing) == len(sweep) else "fail"
        logger.check_event("boundary_decay", report.passed, gamma_fit=report.gamma_fit,
                           correlation=report.correlation, c_fit=report.c_fit,
                           resolvable=report.resolvable_scales)
        record_check("boundary_decay", report.passed)
    return report


def _bound_osc(rows: list[DecayRow], traj: Trajectory, cfg: ExperimentConfig, wiener: WienerReport):
    for j, row in enumerate(rows):
        radius = wiener.rows[j].cylinder_radius if j < len(wiener.rows) else math.nan
        if not math.isfinite(radius) or radius <= 0:
            continue
        duration = wiener.rows[j].cylinder_duration
        row.osc_g = datum_oscillation(traj, Cylinder(Cube(cfg.x_o, radius), cfg.t_o, duration))


def _bound_column(report: VerifierReport, traj: Trajectory, cfg: ExperimentConfig):
    _bound_osc(report.rows, traj, cfg, report.wiener)
    main = report.fits.get(cfg.c)
    for row in report.rows:
        if not row.resolvable or main is None:
            continue
        row.residual = math.log(row.omega) - (main.intercept + main.slope * row.integral)
        g_term = 2 * row.osc_g if math.isfinite(row.osc_g) else 0.0
        row.rhs = report.omega_o * math.exp(-report.gamma_fit * row.integral) + g_term


def _backward_consistency(report: VerifierReport, tolerance: float):
    pairs = [(r.backward, r.centered) for r in report.rows
             if r.resolvable and math.isfinite(r.backward) and math.isfinite(r.centered)]
    if not pairs:
        return
    gaps = [abs(a - b) / max(a, b) if max(a, b) > 0 else 0.0 for a, b in pairs]
    report.backward_consistent = bool(max(gaps) <= tolerance)
    if not report.backward_consistent:
        logger.warning("Backward and centered oscillations differ", max_gap=max(gaps), tolerance=tolerance)


def decay_refinement(cfg: ExperimentConfig) -> RefinementResult:
    """gamma_fit at grid_n / 2 and grid_n"""
    def run(grid_n: int) -> float:
        refined = cfg if grid_n == cfg.domain.grid_n else cfg.refined(grid_n)
        try:
            return verify_boundary_decay(refined).gamma_fit
        except WienerLabError as e:
            logger.warning("Refinement run failed", grid_n=grid_n, error=e.message)
            return math.nan

    result = refinement_check(run, cfg.domain.grid_n, cfg.criteria.stability_factor, workers=1)
    logger.info("Decay refinement", drift=result.drift, stable=result.stable)
    return result


def verify_with_refinement(cfg: ExperimentConfig) -> VerifierReport:
    report = verify_boundary_decay(cfg)
    if report.status != "insufficient-resolution":
        report.refinement = decay_refinement(cfg)
        if not report.refinement.stable:
            report.status = "fail"
    return report


__all__ = [
    "DecayRow",
    "VerifierReport",
    "aligned_horizon",
    "datum_oscillation",
    "decay_refinement",
    "measure_oscillations",
    "reference_oscillation",
    "solve_experiment",
    "verify_boundary_decay",
    "verify_with_refinement",
]
