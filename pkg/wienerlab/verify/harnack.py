# -*- coding: utf-8 -*-
# License: GNU General Public License v3

"""
Harnack-Type Checks

Empirical forms of the estimates behind the decay bound. Each check measures
the smallest (or largest) constant that makes its inequality hold on a
computed trajectory; the constants are existential, so a check passes when
they are positive, finite and stable across a sweep.

* lower bound:      mu delta(rho)^{1/(p-1)} <= gamma avg_{K_2rho} v(., eta)
* L1 Harnack:       sup_t int_{K_rho} u <= gamma inf_t int_{K_2rho} u + gamma ((t1-s1)/rho^lambda)^{1/(2-p)}
* Harnack type:     inf_{K_2rho x late} u >= gamma sigma^d sup_{K_rho x mid} u
* measure density:  |[v(., t) > sigma mu] n K_2rho| >= sigma |K_2rho|
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from wienerlab import __version__
from wienerlab.capacity.condenser import CapacitySettings
from wienerlab.capacity.profile import delta_ratio
from wienerlab.exceptions import ConfigError, PreconditionError
from wienerlab.geometry.cube import Cube, Cylinder
from wienerlab.geometry.domain import DomainMask, domain_from_config
from wienerlab.logger import log_experiment
from wienerlab.pde.manufactured import auxiliary_problem
from wienerlab.pde.solver import SolverSettings, solve_cauchy_dirichlet
from wienerlab.pde.structure import FluxModel
from wienerlab.pde.trajectory import Trajectory
from wienerlab.pde.truncation import lateral_extremes, truncate_and_extend
from wienerlab.utils.config import ConfigDocument
from wienerlab.utils.logging import get_logger, log_context
from wienerlab.utils.metrics import record_check
from wienerlab.utils.validators import Validator, validate_or_raise
from wienerlab.verify.criteria import Criteria
from wienerlab.verify.fitting import RefinementResult, refinement_check
from wienerlab.wiener.exponent import HarnackParams, lambda_r, optimal_r, qo_exponent

logger = get_logger("wienerlab.verify.harnack")

WINDOWS = ("full", "short")


def _cell_volume(domain: DomainMask) -> float:
    return domain.h ** domain.dim


def _require_nonnegative(values: np.ndarray, what: str, tol: float = 1e-8):
    """Negative values below ``-tol * max(1, max |u|)`` are rejected"""
    if not values.size:
        return
    low = float(values.min())
    if low < -tol * max(1.0, float(np.abs(values).max())):
        raise PreconditionError(f"negative u ({low:.3g}) in {what}; the estimate needs u >= 0",
                                details={"min": low})


# Lower bound


@dataclass
class LowerBoundReport:
    rho: float
    eta: float
    k: float
    mu: float
    delta: float
    average_v: float
    ratio: float
    violation_candidate: bool = False

    def to_dict(self) -> dict:
        return asdict(self)


def check_lower_bound(
    traj: Trajectory,
    k: float,
    eta: float,
    rho: float,
    p: float,
    x_o,
    delta: float | None = None,
    s: float | None = None,
    mode: str = "upper",
    settings: CapacitySettings | None = None
) -> LowerBoundReport:
    """R(rho, eta) = mu delta(rho)^{1/(p-1)} / avg_{K_2rho(x_o)} v(., eta).

    mu is the sup of the truncation over K_2rho x (s, eta]; s defaults to the
    first stored time. delta is measured on the trajectory's domain when not
    given.

    Raises:
        PreconditionError: k on the wrong side of the lateral data, or eta
            outside the trajectory.
    """
    validate_or_raise(
        Validator().field("rho", rho).positive().validate(),
        Validator().field("p", p).between(1, 2, open_left=True, open_right=True).validate(),
    )
    start = traj.times[0] if s is None else s
    if not start < eta <= traj.t_final + 1e-12:
        raise PreconditionError(f"eta={eta:.6g} must lie in ({start:.6g}, {traj.t_final:.6g}]")
    domain = traj.domain
    cube = Cube(tuple(x_o), 2 * rho)
    result = truncate_and_extend(traj, k, mode, Cylinder(cube, eta, eta - start))
    if delta is None:
        delta = delta_ratio(domain, x_o, rho, p, settings)

    u = traj.at(eta)
    part = np.maximum(u - k, 0.0) if mode == "upper" else np.maximum(k - u, 0.0)
    v = result.mu - np.where(domain.inside, part, 0.0)
    average = float(v[domain.cube_mask(cube)].mean())

    report = LowerBoundReport(rho, eta, k, result.mu, delta, average, 0.0)
    if result.mu == 0 or delta == 0:
        return report
    if average <= 0:
        report.ratio = math.inf
        report.violation_candidate = True
        logger.warning("avg v vanishes with mu > 0", rho=rho, eta=eta, mu=result.mu, delta=delta)
        return report
    report.ratio = result.mu * delta ** (1 / (p - 1)) / average
    return report


@dataclass
class LowerBoundSweep:
    reports: list[LowerBoundReport]

    @property
    def sup_ratio(self) -> float:
        return max((r.ratio for r in self.reports), default=0.0)

    @property
    def passed(self) -> bool:
        return math.isfinite(self.sup_ratio) and not any(r.violation_candidate for r in self.reports)

    def to_dict(self) -> dict:
        return {"sup_ratio": self.sup_ratio, "passed": self.passed, "rows": [r.to_dict() for r in self.reports]}


def lower_bound_sweep(traj: Trajectory, x_o, scales, eta: float, p: float, k: float | None = None,
                      s: float | None = None, settings: CapacitySettings | None = None) -> LowerBoundSweep:
    """check_lower_bound over ``scales``; k defaults to sup of the lateral data per scale"""
    reports = []
    start = traj.times[0] if s is None else s
    for rho in scales:
        level = k
        if level is None:
            try:
                level = lateral_extremes(traj, Cylinder(Cube(tuple(x_o), 2 * rho), eta, eta - start))[1]
            except PreconditionError:
                level = 0.0
        reports.append(check_lower_bound(traj, level, eta, rho, p, x_o, s=start, settings=settings))
    return LowerBoundSweep(reports)


# L1 Harnack


@dataclass
class L1HarnackReport:
    y: tuple[float, ...]
    rho: float
    s1: float
    t1: float
    lhs: float
    inf_term: float
    time_term: float
    gamma_min: float

    def to_dict(self) -> dict:
        return asdict(self)


def check_l1_harnack(traj: Trajectory, y, rho: float, s1: float, t1: float,
                     p: float | None = None) -> L1HarnackReport:
    """Smallest gamma with sup int_{K_rho(y)} u <= gamma (inf int_{K_2rho(y)} u + B).

    Raises:
        PreconditionError: K_2rho(y) leaves E, the window misses the run, or
            u < 0 on the working region.
    """
    p = float(p if p is not None else traj.metadata.get("model", {}).get("p", math.nan))
    validate_or_raise(
        Validator().field("p", p).between(1, 2, open_left=True, open_right=True).validate(),
        Validator().field("rho", rho).positive().validate(),
    )
    if not s1 < t1:
        raise PreconditionError("empty time window", details={"s1": s1, "t1": t1})
    if s1 < traj.times[0] - 1e-12 or t1 > traj.t_final + 1e-12:
        raise PreconditionError(f"window ({s1:.6g}, {t1:.6g}) leaves the trajectory range")
    domain = traj.domain
    y = tuple(float(v) for v in y)
    small = domain.cube_mask(Cube(y, rho))
    large = domain.cube_mask(Cube(y, 2 * rho))
    if not Cube(y, 2 * rho).inside(domain.bounding_cube) or not domain.inside[large].all():
        raise PreconditionError("K_2rho(y) is not inside E", details={"y": list(y), "rho": rho})

    fields = traj.window_fields(s1, t1)
    for f in fields:
        _require_nonnegative(f[large], "K_2rho(y)")
    cell = _cell_volume(domain)
    lhs = max(float(f[small].sum()) * cell for f in fields)
    inf_term = min(float(f[large].sum()) * cell for f in fields)
    lam = lambda_r(domain.dim, p, 1.0)
    time_term = ((t1 - s1) / rho ** lam) ** (1 / (2 - p))
    gamma_min = lhs / (inf_term + time_term)
    return L1HarnackReport(y, rho, s1, t1, lhs, inf_term, time_term, gamma_min)


@dataclass
class L1HarnackSweep:
    reports: list[L1HarnackReport]
    spread_limit: float = 0.5

    @property
    def gammas(self) -> list[float]:
        return [r.gamma_min for r in self.reports]

    @property
    def spread(self) -> float:
        values = self.gammas
        if not values or max(values) <= 0:
            return math.inf
        return (max(values) - min(values)) / max(values)

    @property
    def passed(self) -> bool:
        return bool(self.gammas) and min(self.gammas) > 0 and self.spread <= self.spread_limit

    def to_dict(self) -> dict:
        return {"gammas": self.gammas, "spread": self.spread, "passed": self.passed,
                "rows": [r.to_dict() for r in self.reports]}


# Harnack type


@dataclass
class HarnackTypeReport:
    y: tuple[float, ...]
    s: float
    rho: float
    window: str
    theta: float
    sigma: float
    d: float
    inf_value: float
    sup_value: float
    ratio: float
    contained: bool
    vacuous: bool = False

    def to_dict(self) -> dict:
        return asdict(self)


def harnack_windows(s: float, theta: float, rho: float, p: float, window: str = "full"):
    """((inf_start, inf_end), (sup_start, sup_end)) in absolute time"""
    if window not in WINDOWS:
        raise ValueError(f"window must be one of {WINDOWS}, got {window!r}")
    span = theta * rho ** p
    inf_end = 1.0 if window == "full" else 0.75 + 4.0 ** (-(p + 1))
    return (s + 0.75 * span, s + inf_end * span), (s + 0.5 * span, s + span)


def check_harnack_type(
    traj: Trajectory,
    y,
    s: float,
    rho: float,
    params: HarnackParams,
    c2: float = 0.5,
    window: str = "full"
) -> HarnackTypeReport:
    """Empirical inf / (sigma^d sup) from the slice u(., s).

    theta = c2 (avg_{K_2rho(y)} u(., s))^{2-p} and
    sigma = (avg u / (avg u^r)^{1/r})^{p r / lambda_r}, both averages over
    K_2rho(y). The inf runs over K_2rho(y) in the late window, the sup over
    K_rho(y) in the middle window. Whether
    K_16rho(y) x [s, s + theta rho^p] fits the computed region is reported,
    not enforced.

    Raises:
        PreconditionError: u < 0, or the window runs past the trajectory.
    """
    validate_or_raise(
        Validator().field("rho", rho).positive().validate(),
        Validator().field("c2", c2).between(0, 1, open_left=True, open_right=True).validate(),
    )
    domain = traj.domain
    p = params.p
    y = tuple(float(v) for v in y)
    slice_s = traj.at(s)
    small = domain.cube_mask(Cube(y, rho)) & domain.inside
    large = domain.cube_mask(Cube(y, 2 * rho)) & domain.inside
    if not small.any():
        raise PreconditionError("K_rho(y) contains no cell of E")
    base = slice_s[large]
    _require_nonnegative(base, "K_2rho(y) at time s")
    average = float(base.mean())
    if average <= 0:
        return HarnackTypeReport(y, s, rho, window, 0.0, 0.0, params.d, 0.0, 0.0, math.inf, True, vacuous=True)

    theta = c2 * average ** (2 - p)
    r_mean = float(np.mean(base ** params.r)) ** (1 / params.r)
    sigma = (average / r_mean) ** (p * params.r / params.lambda_r)
    (inf_a, inf_b), (sup_a, sup_b) = harnack_windows(s, theta, rho, p, window)
    if sup_b > traj.t_final + 1e-12:
        raise PreconditionError(f"Harnack window ends at {sup_b:.6g}, after the run ({traj.t_final:.6g})",
                                details={"theta": theta})
    contained = (Cube(y, 16 * rho).inside(domain.bounding_cube)
                 and bool(domain.inside[domain.cube_mask(Cube(y, 16 * rho))].all()))

    late = traj.window_fields(inf_a, inf_b)
    mid = traj.window_fields(sup_a, sup_b)
    for f in late + mid:
        _require_nonnegative(f[large], "K_2rho(y) over the window")
    inf_value = min(float(f[large].min()) for f in late)
    sup_value = max(float(f[small].max()) for f in mid)
    if sup_value <= 0:
        return HarnackTypeReport(y, s, rho, window, theta, sigma, params.d, inf_value, sup_value, math.inf,
                                 contained, vacuous=True)
    ratio = inf_value / (sigma ** params.d * sup_value)
    return HarnackTypeReport(y, s, rho, window, theta, sigma, params.d, inf_value, sup_value, ratio, contained)


@dataclass
class HarnackTypeSweep:
    reports: list[HarnackTypeReport]

    @property
    def lower_bound(self) -> float:
        """Smallest non-vacuous ratio"""
        values = [r.ratio for r in self.reports if not r.vacuous]
        return min(values) if values else math.inf

    @property
    def passed(self) -> bool:
        return self.lower_bound > 0

    def to_dict(self) -> dict:
        bound = self.lower_bound
        return {"lower_bound": bound if math.isfinite(bound) else None, "passed": self.passed,
                "rows": [r.to_dict() for r in self.reports]}


# Measure density


@dataclass
class MeasureDensityReport:
    rho: float
    mu: float
    sigma_fit: float
    fractions: list[float] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.sigma_fit > 0

    def to_dict(self) -> dict:
        return {"rho": self.rho, "mu": self.mu, "sigma_fit": self.sigma_fit, "passed": self.passed}


def check_measure_density(
    traj: Trajectory,
    x_o,
    rho: float,
    k: float,
    t_start: float,
    t_end: float,
    mode: str = "upper",
    sigmas: int = 200
) -> MeasureDensityReport:
    """Largest sigma with |[v(., t) > sigma mu] n K_2rho| >= sigma |K_2rho| at every stored t in the window"""
    cube = Cube(tuple(x_o), 2 * rho)
    result = truncate_and_extend(traj, k, mode, Cylinder(cube, t_end, t_end - t_start))
    region = traj.domain.cube_mask(cube)
    if result.mu <= 0:
        return MeasureDensityReport(rho, 0.0, 0.0)
    grid = np.linspace(1.0 / sigmas, 1.0, sigmas)
    fractions = []
    best = 0.0
    for sigma in grid:
        worst = min(float((v[region] > sigma * result.mu).mean()) for v in result.v)
        fractions.append(worst)
        if worst >= sigma:
            best = float(sigma)
    return MeasureDensityReport(rho, result.mu, best, fractions)


# Suite


@dataclass
class HarnackCheckConfig:
    """Config kind ``harnack``::

        [auxiliary]         # optional; zero lateral data, bump u_o in K_2rho
        x_o = 0, 0
        rho = 0.125
        amplitude = 1
        [run]
        horizon = 0.5
        [l1]
        y = 0, 0
        rho = 0.125
        windows = 0.01, 0.05; 0.01, 0.1; 0.02, 0.1
        [harnack_type]
        y = 0, 0
        s = 0.01
        scales = 0.25, 0.125, 0.0625
        c2 = 0.5
        window = full
        [lower_bound]       # optional
        x_o = 0, 0
        scales = 0.25, 0.125, 0.0625, 0.03125
        eta = 0.3
    """
    domain: DomainMask
    model: FluxModel
    solver: SolverSettings
    horizon: float
    auxiliary: dict | None = None
    l1: dict | None = None
    harnack_type: dict | None = None
    lower_bound: dict | None = None
    params: HarnackParams | None = None
    capacity: CapacitySettings = field(default_factory=CapacitySettings)
    criteria: Criteria = field(default_factory=Criteria)
    snapshot: dict = field(default_factory=dict)

    def refined(self, grid_n: int) -> HarnackCheckConfig:
        factor = grid_n / self.domain.grid_n
        return replace(self, domain=self.domain.at_resolution(grid_n),
                       solver=replace(self.solver, dt=self.solver.dt / factor))

    @classmethod
    def from_config(cls, doc: ConfigDocument) -> HarnackCheckConfig:
        domain = domain_from_config(doc)
        dim = domain.dim
        model = FluxModel.from_config(doc, dim)
        r = doc.get_optional_float("harnack", "r")
        allow = doc.get_bool("harnack", "allow_supercritical", False)
        params = qo_exponent(model.p, dim, r if r is not None else optimal_r(model.p, dim, allow),
                             doc.get_str("harnack", "d_mode", "prototype"),
                             doc.get_optional_float("harnack", "d"), allow)

        def point(section: str, key: str) -> tuple[float, ...]:
            value = doc.get_floats(section, key, (0.0,) * dim)
            if len(value) != dim:
                raise ConfigError(f"expected {dim} coordinates", field=f"{section}.{key}")
            return value

        auxiliary = None
        if doc.has_section("auxiliary"):
            auxiliary = {"x_o": point("auxiliary", "x_o"), "rho": doc.get_float("auxiliary", "rho"),
                         "amplitude": doc.get_float("auxiliary", "amplitude", 1.0)}
        l1 = None
        if doc.has_section("l1"):
            l1 = {"y": point("l1", "y"), "rho": doc.get_float("l1", "rho"),
                  "windows": _windows(doc.get_str("l1", "windows"), doc.section("l1")["windows"].line)}
        harnack_type = None
        if doc.has_section("harnack_type"):
            window = doc.get_str("harnack_type", "window", "full")
            if window not in WINDOWS:
                raise ConfigError(f"window must be one of {WINDOWS}", field="harnack_type.window")
            harnack_type = {"y": point("harnack_type", "y"), "s": doc.get_float("harnack_type", "s"),
                            "scales": doc.get_floats("harnack_type", "scales"),
                            "c2": doc.get_float("harnack_type", "c2", 0.5), "window": window}
        lower_bound = None
        if doc.has_section("lower_bound"):
            lower_bound = {"x_o": point("lower_bound", "x_o"), "scales": doc.get_floats("lower_bound", "scales"),
                           "eta": doc.get_float("lower_bound", "eta"),
                           "k": doc.get_optional_float("lower_bound", "k"),
                           "s": doc.get_optional_float("lower_bound", "s")}
        if not (l1 or harnack_type or lower_bound):
            raise ConfigError("no check enabled; add [l1], [harnack_type] or [lower_bound]", field="harnack")
        return cls(domain, model, SolverSettings.from_config(doc), doc.get_float("run", "horizon"),
                   auxiliary, l1, harnack_type, lower_bound, params, CapacitySettings.from_config(doc),
                   Criteria.from_config(doc), doc.snapshot())


def _windows(text: str, line: int) -> list[tuple[float, float]]:
    out = []
    for chunk in text.split(";"):
        parts = [v.strip() for v in chunk.split(",") if v.strip()]
        try:
            s1, t1 = (float(v) for v in parts)
        except ValueError:
            raise ConfigError(f"expected 's1, t1' pairs, got {chunk.strip()!r}", field="l1.windows", line=line)
        out.append((s1, t1))
    return out


@dataclass
class HarnackSuiteReport:
    l1: L1HarnackSweep | None = None
    harnack_type: HarnackTypeSweep | None = None
    lower_bound: LowerBoundSweep | None = None
    refinement: RefinementResult | None = None
    config: dict = field(default_factory=dict)

    @property
    def checks(self) -> dict[str, bool]:
        out = {}
        for name in ("l1", "harnack_type", "lower_bound"):
            part = getattr(self, name)
            if part is not None:
                out[name] = part.passed
        if self.refinement is not None:
            out["refinement"] = self.refinement.stable
        return out

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def fitted_constant(self) -> float:
        """Quantity tracked under refinement: the Harnack-type lower bound, else
        the mean L1 gamma, else the lower-bound sup
        """
        if self.harnack_type is not None and math.isfinite(self.harnack_type.lower_bound):
            return self.harnack_type.lower_bound
        if self.l1 is not None and self.l1.gammas:
            return float(np.mean(self.l1.gammas))
        if self.lower_bound is not None:
            return self.lower_bound.sup_ratio
        return math.nan

    def summary(self) -> dict:
        out: dict = {"passed": self.passed, "checks": self.checks, "version": __version__, "config": self.config}
        for name in ("l1", "harnack_type", "lower_bound"):
            part = getattr(self, name)
            if part is not None:
                out[name] = part.to_dict()
        if self.refinement is not None:
            out["refinement"] = self.refinement.to_dict()
        return out

    def to_json(self, path: str | Path) -> Path:
        path = Path(path)
        path.write_text(json.dumps(self.summary(), indent=2, sort_keys=True, default=str), encoding="utf-8")
        return path


def _trajectory(cfg: HarnackCheckConfig) -> Trajectory:
    if cfg.auxiliary is None:
        return solve_cauchy_dirichlet(cfg.domain, cfg.model, cfg.domain.datum, cfg.horizon, cfg.solver)
    aux = auxiliary_problem(cfg.domain, cfg.auxiliary["x_o"], cfg.auxiliary["rho"], cfg.auxiliary["amplitude"])
    return solve_cauchy_dirichlet(aux.domain, cfg.model, aux.domain.datum, cfg.horizon, cfg.solver,
                                  initial=aux.initial)


@log_experiment("Harnack checks")
def run_harnack_suite(cfg: HarnackCheckConfig, traj: Trajectory | None = None) -> HarnackSuiteReport:
    traj = traj or _trajectory(cfg)
    report = HarnackSuiteReport(config=cfg.snapshot)
    with log_context(check="harnack"):
        if cfg.l1 is not None:
            rows = [check_l1_harnack(traj, cfg.l1["y"], cfg.l1["rho"], s1, t1, cfg.model.p)
                    for s1, t1 in cfg.l1["windows"]]
            report.l1 = L1HarnackSweep(rows, cfg.criteria.window_spread)
            logger.check_event("l1_harnack", report.l1.passed, spread=report.l1.spread)
            record_check("l1_harnack", report.l1.passed)
        if cfg.harnack_type is not None:
            part = cfg.harnack_type
            rows = [check_harnack_type(traj, part["y"], part["s"], rho, cfg.params, part["c2"], part["window"])
                    for rho in part["scales"]]
            report.harnack_type = HarnackTypeSweep(rows)
            logger.check_event("harnack_type", report.harnack_type.passed,
                               lower_bound=report.harnack_type.lower_bound)
            record_check("harnack_type", report.harnack_type.passed)
        if cfg.lower_bound is not None:
            part = cfg.lower_bound
            report.lower_bound = lower_bound_sweep(traj, part["x_o"], part["scales"], part["eta"], cfg.model.p,
                                                   part["k"], part["s"], cfg.capacity)
            logger.check_event("lower_bound", report.lower_bound.passed, sup_ratio=report.lower_bound.sup_ratio)
            record_check("lower_bound", report.lower_bound.passed)
    return report


def harnack_refinement(cfg: HarnackCheckConfig) -> RefinementResult:
    """Fitted constant at grid_n / 2 and grid_n"""
    def run(grid_n: int) -> float:
        return run_harnack_suite(cfg if grid_n == cfg.domain.grid_n else cfg.refined(grid_n)).fitted_constant()

    return refinement_check(run, cfg.domain.grid_n, cfg.criteria.stability_factor, workers=1)
