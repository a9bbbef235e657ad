# -*- coding: utf-8 -*-
# License: GNU General Public License v3

"""
Experiment Configuration

An experiment bundles the domain, datum, model, boundary point, scales and
solver settings of one verification run. Config sections::

    kind = verify
    [experiment]
    x_o = 0, 0
    t_o = 1.2
    r_o = 0.5             # base radius R_o
    num_scales = 4
    alpha = 1
    c = 0.1
    working_factor = 2
    horizon = 1.25        # T; defaults to t_o
    future_check = true
    [harnack]
    r = auto
    d_mode = prototype
    [domain] [datum] [model] [solver] [capacity] [criteria]
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from wienerlab.capacity.condenser import CapacitySettings
from wienerlab.exceptions import ConfigError, WienerLabError
from wienerlab.geometry.cube import Cube
from wienerlab.geometry.domain import DomainMask, domain_from_config
from wienerlab.pde.solver import SolverSettings
from wienerlab.pde.structure import FluxModel
from wienerlab.utils.config import ConfigDocument, ConfigIssue, ConfigValidationResult, ConfigValidator
from wienerlab.verify.criteria import Criteria
from wienerlab.wiener.exponent import HarnackParams, optimal_r, qo_exponent


@dataclass
class ExperimentConfig:
    domain: DomainMask
    model: FluxModel
    x_o: tuple[float, ...]
    t_o: float
    R_o: float
    num_scales: int = 4
    rho_0: float | None = None
    alpha: float = 1.0
    c: float = 0.1
    horizon: float | None = None
    r: float | None = None
    d_mode: str = "prototype"
    d: float | None = None
    allow_supercritical: bool = False
    working_factor: float = 2.0
    future_check: bool = False
    future_extension: float = 0.1
    solver: SolverSettings = field(default_factory=SolverSettings)
    capacity: CapacitySettings = field(default_factory=CapacitySettings)
    criteria: Criteria = field(default_factory=Criteria)
    snapshot: dict = field(default_factory=dict)

    @property
    def p(self) -> float:
        return self.model.p

    @property
    def dim(self) -> int:
        return self.domain.dim

    @property
    def T(self) -> float:
        return self.horizon if self.horizon is not None else self.t_o

    @property
    def base_scale(self) -> float:
        return self.rho_0 if self.rho_0 is not None else self.R_o

    def scales(self) -> list[float]:
        ratio = self.capacity.scale_ratio
        return [self.base_scale * ratio ** j for j in range(self.num_scales)]

    def harnack_params(self) -> HarnackParams:
        r = self.r if self.r is not None else optimal_r(self.p, self.dim, self.allow_supercritical)
        return qo_exponent(self.p, self.dim, r, self.d_mode, self.d, self.allow_supercritical)

    def working_cube(self) -> dict:
        """Working cube actually used against the nominal K_32rho containment"""
        nominal = self.criteria.nominal_working_factor
        return {"factor": self.working_factor, "nominal_factor": nominal,
                "nominal_containment": self.working_factor >= nominal}

    def refined(self, grid_n: int) -> ExperimentConfig:
        """Same experiment on ``grid_n`` cells per axis, dt scaled alike"""
        factor = grid_n / self.domain.grid_n
        return replace(self, domain=self.domain.at_resolution(grid_n),
                       solver=replace(self.solver, dt=self.solver.dt / factor))

    @classmethod
    def from_config(cls, doc: ConfigDocument, section: str = "experiment") -> ExperimentConfig:
        domain = domain_from_config(doc)
        dim = domain.dim
        if not doc.has_section("model"):
            raise ConfigError("required section is missing", field="model")
        model = FluxModel.from_config(doc, dim)
        x_o = doc.get_floats(section, "x_o", (0.0,) * dim)
        if len(x_o) != dim:
            raise ConfigError(f"expected {dim} coordinates", field=f"{section}.x_o",
                              line=doc.section(section)["x_o"].line)
        harnack = "harnack"
        return cls(
            domain=domain,
            model=model,
            x_o=x_o,
            t_o=doc.get_float(section, "t_o"),
            R_o=doc.get_float(section, "r_o"),
            num_scales=doc.get_int(section, "num_scales", 4),
            rho_0=doc.get_optional_float(section, "rho_0"),
            alpha=doc.get_float(section, "alpha", 1.0),
            c=doc.get_float(section, "c", 0.1),
            horizon=doc.get_optional_float(section, "horizon"),
            r=doc.get_optional_float(harnack, "r"),
            d_mode=doc.get_str(harnack, "d_mode", "prototype"),
            d=doc.get_optional_float(harnack, "d"),
            allow_supercritical=doc.get_bool(harnack, "allow_supercritical", False),
            working_factor=doc.get_float(section, "working_factor", 2.0),
            future_check=doc.get_bool(section, "future_check", False),
            future_extension=doc.get_float(section, "future_extension", 0.1),
            solver=SolverSettings.from_config(doc),
            capacity=CapacitySettings.from_config(doc),
            criteria=Criteria.from_config(doc),
            snapshot=doc.snapshot(),
        )


class ExperimentValidator(ConfigValidator):
    """Errors block the run; warnings go to the log and the report"""

    checks = (
        "_validate_window",
        "_validate_scales",
        "_validate_working_cube",
        "_validate_exponent",
    )

    def _validate_window(self, cfg: ExperimentConfig) -> list[ConfigIssue]:
        issues = []
        if not 0 < cfg.R_o < 1:
            issues.append(ConfigIssue("experiment.r_o", "R_o must lie in (0, 1)"))
        start = cfg.t_o - 2 * cfg.R_o ** cfg.p
        if start <= 0:
            issues.append(ConfigIssue("experiment.t_o",
                                      f"(t_o - 2 R_o^p, t_o] must lie in (0, T]; t_o - 2 R_o^p = {start:.6g}"))
        if cfg.T < cfg.t_o:
            issues.append(ConfigIssue("experiment.horizon", "horizon must not end before t_o"))
        if not 0 < cfg.alpha <= 1:
            issues.append(ConfigIssue("experiment.alpha", "alpha must lie in (0, 1]"))
        if not 0 < cfg.c < 1:
            issues.append(ConfigIssue("experiment.c", "c must lie in (0, 1)"))
        return issues

    def _validate_scales(self, cfg: ExperimentConfig) -> list[ConfigIssue]:
        issues = []
        if cfg.num_scales < 3:
            issues.append(ConfigIssue("experiment.num_scales", "at least 3 scales are needed"))
        if cfg.base_scale > cfg.R_o * (1 + 1e-12):
            issues.append(ConfigIssue("experiment.rho_0", "largest scale must not exceed R_o"))
        return issues

    def _validate_working_cube(self, cfg: ExperimentConfig) -> list[ConfigIssue]:
        issues = []
        if cfg.working_factor < 1:
            issues.append(ConfigIssue("experiment.working_factor", "working factor must be at least 1"))
            return issues
        working = Cube(cfg.x_o, cfg.working_factor * cfg.base_scale)
        if not working.inside(cfg.domain.bounding_cube):
            issues.append(ConfigIssue(
                "experiment.working_factor",
                f"K_{{{cfg.working_factor:g} rho}}(x_o) leaves the bounding cube at rho = {cfg.base_scale:g}"))
        if not Cube(cfg.x_o, cfg.capacity.annulus_ratio * cfg.base_scale).inside(cfg.domain.bounding_cube):
            issues.append(ConfigIssue("capacity.annulus_ratio", "capacity annulus leaves the bounding cube"))
        if cfg.working_factor < cfg.criteria.nominal_working_factor:
            issues.append(ConfigIssue(
                "experiment.working_factor",
                f"working cube K_{{{cfg.working_factor:g} rho}} is smaller than "
                f"K_{{{cfg.criteria.nominal_working_factor:g} rho}}; results are desk-scale",
                severity="warning"))
        return issues

    def _validate_exponent(self, cfg: ExperimentConfig) -> list[ConfigIssue]:
        try:
            cfg.harnack_params()
        except WienerLabError as e:
            return [ConfigIssue("harnack", e.message)]
        return []


def validate_experiment(cfg: ExperimentConfig) -> ConfigValidationResult:
    result = ExperimentValidator().validate(cfg)
    result.log_warnings()
    result.raise_if_invalid()
    return result
