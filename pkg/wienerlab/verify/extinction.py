# -*- coding: utf-8 -*-
# License: GNU General Public License v3

"""
Extinction Window

Solutions of the auxiliary problem (zero lateral data, u_o supported in
K_2rho) vanish in finite time, but not before a time of order
rho^p (avg_{K_2rho} u_o)^{2-p}, the intrinsic scale of the run. The check
measures the numeric extinction time and the dimensionless ratio
t_ext / intrinsic scale for every amplitude. One window fraction c is fitted
for all amplitudes (half the smallest dimensionless life), and the K_4rho
average must keep a fraction kappa >= ``persistence_floor`` of avg u_o up to
c times the intrinsic scale of each run. With ``--refine`` both c and kappa
must stay within ``stability_factor`` at grid_n / 2 (and 2 dt).

Config kind ``extinction``::

    [auxiliary]
    x_o = 0, 0
    rho = 0.125
    amplitude = 1
    scale_factors = 1, 2
    [run]
    horizon = 1.0
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from wienerlab import __version__
from wienerlab.exceptions import ConfigError
from wienerlab.geometry.cube import Cube
from wienerlab.geometry.domain import DomainMask, domain_from_config
from wienerlab.logger import log_experiment
from wienerlab.pde.manufactured import auxiliary_problem
from wienerlab.pde.solver import SolverSettings, solve_cauchy_dirichlet
from wienerlab.pde.structure import FluxModel
from wienerlab.pde.trajectory import Trajectory
from wienerlab.utils.background import run_ordered
from wienerlab.utils.config import ConfigDocument
from wienerlab.utils.logging import get_logger, log_context
from wienerlab.utils.metrics import record_check
from wienerlab.utils.validators import Validator, validate_or_raise
from wienerlab.verify.criteria import Criteria
from wienerlab.verify.fitting import RefinementResult, drift_factor

logger = get_logger("wienerlab.verify.extinction")


@dataclass
class ExtinctionConfig:
    domain: DomainMask
    model: FluxModel
    solver: SolverSettings
    x_o: tuple[float, ...]
    rho: float
    horizon: float
    amplitude: float = 1.0
    scale_factors: tuple[float, ...] = (1.0, 2.0)
    criteria: Criteria = field(default_factory=Criteria)
    snapshot: dict = field(default_factory=dict)

    def refined(self, grid_n: int) -> ExtinctionConfig:
        factor = grid_n / self.domain.grid_n
        return replace(self, domain=self.domain.at_resolution(grid_n),
                       solver=replace(self.solver, dt=self.solver.dt / factor))

    @classmethod
    def from_config(cls, doc: ConfigDocument) -> ExtinctionConfig:
        domain = domain_from_config(doc)
        x_o = doc.get_floats("auxiliary", "x_o", (0.0,) * domain.dim)
        if len(x_o) != domain.dim:
            raise ConfigError(f"expected {domain.dim} coordinates", field="auxiliary.x_o")
        factors = doc.get_floats("auxiliary", "scale_factors", (1.0, 2.0))
        if any(f <= 0 for f in factors):
            raise ConfigError("scale factors must be positive", field="auxiliary.scale_factors")
        return cls(domain, FluxModel.from_config(doc, domain.dim), SolverSettings.from_config(doc), x_o,
                   doc.get_float("auxiliary", "rho"), doc.get_float("run", "horizon"),
                   doc.get_float("auxiliary", "amplitude", 1.0), factors, Criteria.from_config(doc),
                   doc.snapshot())


@dataclass
class ExtinctionRun:
    amplitude: float
    initial_average: float
    initial_sup: float
    intrinsic_scale: float
    t_ext: float | None
    ratio: float | None
    life_fraction: float | None = None
    window_end: float = 0.0
    kappa_fit: float = 0.0

    @property
    def extinct(self) -> bool:
        return self.t_ext is not None

    @property
    def active(self) -> bool:
        return self.initial_sup > 0

    def to_dict(self) -> dict:
        return {**self.__dict__, "extinct": self.extinct}


@dataclass
class ExtinctionReport:
    rho: float
    p: float
    horizon: float
    runs: list[ExtinctionRun] = field(default_factory=list)
    window_fraction: float | None = None
    tolerance: float = 0.25
    persistence_floor: float = 0.01
    refinement: RefinementResult | None = None
    window_refinement: RefinementResult | None = None
    config: dict = field(default_factory=dict)

    @property
    def ratio_spread(self) -> float | None:
        """Relative spread of the dimensionless ratio across amplitudes"""
        ratios = [r.ratio for r in self.runs if r.ratio is not None and r.ratio > 0]
        if len(ratios) < 2:
            return None
        return (max(ratios) - min(ratios)) / max(ratios)

    @property
    def scale_invariant(self) -> bool | None:
        spread = self.ratio_spread
        return None if spread is None else spread <= self.tolerance

    @property
    def min_kappa(self) -> float | None:
        active = [r.kappa_fit for r in self.runs if r.active]
        return min(active) if active else None

    @property
    def passed(self) -> bool:
        kappa = self.min_kappa
        if kappa is not None and kappa < self.persistence_floor:
            return False
        if self.scale_invariant is False:
            return False
        return all(result is None or result.stable for result in (self.refinement, self.window_refinement))

    def summary(self) -> dict:
        return {
            "passed": self.passed,
            "rho": self.rho,
            "p": self.p,
            "horizon": self.horizon,
            "runs": [r.to_dict() for r in self.runs],
            "window_fraction": self.window_fraction,
            "min_kappa": self.min_kappa,
            "persistence_floor": self.persistence_floor,
            "ratio_spread": self.ratio_spread,
            "scale_invariant": self.scale_invariant,
            "refinement": self.refinement.to_dict() if self.refinement else None,
            "window_refinement": self.window_refinement.to_dict() if self.window_refinement else None,
            "version": __version__,
            "config": self.config,
        }

    def to_json(self, path: str | Path) -> Path:
        path = Path(path)
        path.write_text(json.dumps(self.summary(), indent=2, sort_keys=True, default=str), encoding="utf-8")
        return path


def extinction_time(traj: Trajectory, threshold: float = 1e-6) -> float | None:
    """First stored time with sup u < threshold sup u_o; 0 for vanishing data, None if never"""
    sups = traj.sup_norms()
    if sups[0] == 0:
        return traj.times[0]
    below = np.nonzero(sups < threshold * sups[0])[0]
    return traj.times[int(below[0])] if below.size else None


def intrinsic_scale(rho: float, p: float, initial_average: float) -> float:
    """rho^p (avg_{K_2rho} u_o)^{2-p}"""
    if initial_average <= 0:
        return 0.0
    return rho ** p * initial_average ** (2 - p)


def fit_window_fraction(runs: list[ExtinctionRun]) -> float | None:
    """Half the smallest life in units of the intrinsic scale.

    Runs that never went extinct count with the horizon, a lower bound on
    their life.
    """
    lives = [r.life_fraction for r in runs if r.active and r.life_fraction is not None]
    return 0.5 * min(lives) if lives else None


def persistence_fraction(traj: Trajectory, x_o, rho: float, initial_average: float, window_end: float) -> float:
    """min over stored t <= window_end of avg_{K_4rho} u(., t) / avg_{K_2rho} u_o"""
    if initial_average <= 0:
        return 0.0
    region = traj.domain.cube_mask(Cube(tuple(x_o), 4 * rho))
    values = [float(f[region].mean()) for t, f in zip(traj.times, traj.fields) if t <= window_end + 1e-12]
    return min(values) / initial_average


def _single_run(cfg: ExtinctionConfig, amplitude: float) -> tuple[ExtinctionRun, Trajectory]:
    aux = auxiliary_problem(cfg.domain, cfg.x_o, cfg.rho, amplitude)
    traj = solve_cauchy_dirichlet(aux.domain, cfg.model, aux.domain.datum, cfg.horizon, cfg.solver,
                                  initial=aux.initial)
    average = aux.initial_average
    scale = intrinsic_scale(cfg.rho, cfg.model.p, average)
    t_ext = extinction_time(traj, cfg.criteria.extinction_threshold)
    ratio = life = None
    if scale > 0:
        life = (t_ext if t_ext is not None else traj.t_final) / scale
        ratio = t_ext / scale if t_ext is not None else None
    logger.info("Extinction run", amplitude=amplitude, t_ext=t_ext, intrinsic_scale=scale, ratio=ratio)
    if t_ext is None:
        logger.warning("No extinction within the horizon", horizon=cfg.horizon, amplitude=amplitude)
    run = ExtinctionRun(amplitude, average, float(np.abs(aux.initial).max()), scale, t_ext, ratio, life)
    return run, traj


@log_experiment("Extinction window")
def check_extinction_window(cfg: ExtinctionConfig, workers: int | None = None) -> ExtinctionReport:
    """Extinction time, dimensionless ratio and persistence through the fitted
    intrinsic window for every amplitude factor
    """
    validate_or_raise(
        Validator().field("rho", cfg.rho).positive().validate(),
        Validator().field("horizon", cfg.horizon).positive().validate(),
    )
    report = ExtinctionReport(cfg.rho, cfg.model.p, cfg.horizon, tolerance=cfg.criteria.extinction_tolerance,
                              persistence_floor=cfg.criteria.persistence_floor, config=cfg.snapshot)
    with log_context(check="extinction"):
        amplitudes = [cfg.amplitude * f for f in cfg.scale_factors]
        solved = run_ordered(lambda a: _single_run(cfg, a), amplitudes, workers)
        report.runs = [run for run, _ in solved]
        report.window_fraction = fit_window_fraction(report.runs)
        for run, traj in solved:
            if run.active and report.window_fraction is not None:
                run.window_end = report.window_fraction * run.intrinsic_scale
                run.kappa_fit = persistence_fraction(traj, cfg.x_o, cfg.rho, run.initial_average, run.window_end)
        logger.check_event("extinction", report.passed, window_fraction=report.window_fraction,
                           min_kappa=report.min_kappa, ratio_spread=report.ratio_spread)
        record_check("extinction", report.passed)
    return report


def extinction_refinement(cfg: ExtinctionConfig) -> tuple[RefinementResult, RefinementResult]:
    """(window fraction, smallest kappa) at grid_n / 2 with doubled dt and at grid_n"""
    sizes = (cfg.domain.grid_n // 2, cfg.domain.grid_n)

    def run(grid_n: int) -> ExtinctionReport:
        target = cfg if grid_n == cfg.domain.grid_n else cfg.refined(grid_n)
        return check_extinction_window(replace(target, scale_factors=target.scale_factors[:1]), workers=1)

    reports = run_ordered(run, sizes, 1)

    def result(values: tuple[float, float]) -> RefinementResult:
        drift = drift_factor(*values)
        return RefinementResult(sizes, values, drift, drift < cfg.criteria.stability_factor)

    def value(x: float | None) -> float:
        return math.nan if x is None else float(x)

    return (result((value(reports[0].window_fraction), value(reports[1].window_fraction))),
            result((value(reports[0].min_kappa), value(reports[1].min_kappa))))
