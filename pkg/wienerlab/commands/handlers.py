# -*- coding: utf-8 -*-
# License: GNU General Public License v3

"""
Command Handlers

One handler per subcommand. A handler reads its sections from the parsed
config, runs the wrapped operation, writes CSV and JSON into the output
directory (listing each file in the manifest) and returns the exit code
for a completed run: 0 when every enabled check passes, 1 otherwise.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any


from wienerlab.capacity.condenser import CapacitySettings, ball_condenser, cube_condenser, p_capacity
from wienerlab.capacity.profile import CapacityProfile, capacity_profile, thickness_profile
from wienerlab.capacity.radial import radial_capacity
from wienerlab.commands.manifest import RunManifest
from wienerlab.commands.plots import line_chart
from wienerlab.exceptions import ConfigError
from wienerlab.geometry.datum import sampled_holder_constant
from wienerlab.geometry.descriptors import descriptor_from_config
from wienerlab.geometry.domain import domain_from_config
from wienerlab.pde.solver import SolverSettings, solve_cauchy_dirichlet
from wienerlab.pde.structure import FluxModel
from wienerlab.utils.config import ConfigDocument
from wienerlab.utils.logging import get_logger
from wienerlab.verify.decay import VerifierReport, verify_boundary_decay, verify_with_refinement
from wienerlab.verify.experiment import ExperimentConfig
from wienerlab.verify.criteria import Criteria
from wienerlab.verify.extinction import ExtinctionConfig, check_extinction_window, extinction_refinement
from wienerlab.verify.harnack import HarnackCheckConfig, harnack_refinement, run_harnack_suite
from wienerlab.verify.holder import check_pfat_holder
from wienerlab.wiener.exponent import c1_constant, critical_exponent, optimal_r, qo_exponent
from wienerlab.wiener.report import modulus_and_reference

logger = get_logger("wienerlab.commands")

EXIT_PASS = 0
EXIT_FAIL = 1


@dataclass
class CommandContext:
    out_dir: Path
    manifest: RunManifest
    config_path: Path
    workers: int | None = None
    seed: int = 0
    svg: bool = False
    refine: bool = False

    def output(self, name: str) -> Path:
        return self.manifest.add_output(self.out_dir / name)

    def resolve(self, relative: str) -> Path:
        """Paths in a config are relative to the config file"""
        path = Path(relative)
        return path if path.is_absolute() else self.config_path.parent / path

    def capacity_settings(self, doc: ConfigDocument) -> CapacitySettings:
        settings = CapacitySettings.from_config(doc)
        return replace(settings, workers=self.workers) if self.workers is not None else settings


def write_json(path: Path, payload: dict[str, Any]) -> Path:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True, default=str), encoding="utf-8")
    return path


def write_rows(path: Path, header: list[str], rows: list[list[Any]]) -> Path:
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return path


def _point(doc: ConfigDocument, section: str, key: str, dim: int) -> tuple[float, ...]:
    value = doc.get_floats(section, key, (0.0,) * dim)
    if len(value) != dim:
        raise ConfigError(f"expected {dim} coordinates", field=f"{section}.{key}",
                          line=doc.section(section)[key].line)
    return value


def cmd_capacity(doc: ConfigDocument, ctx: CommandContext) -> int:
    """``[condenser]`` shape = ball (r, r_outer) | cube (center, rho, ratio).

    A ``[domain]`` section restricts the cube's K to the complement of E.
    """
    section = "condenser"
    settings = ctx.capacity_settings(doc)
    shape = doc.get_str(section, "shape", "ball").lower()
    dim = doc.get_int(section, "dim", 2)
    p = doc.get_float(section, "p")
    cells = doc.get_int(section, "cells", settings.cells_for(dim))
    payload: dict[str, Any] = {"shape": shape, "dim": dim, "p": p, "cells": cells}

    oracle = None
    if shape == "ball":
        r, R = doc.get_float(section, "r"), doc.get_float(section, "r_outer")
        condenser = ball_condenser(dim, r, R, p, cells)
        oracle = radial_capacity(dim, p, r, R)
        payload.update({"r": r, "R": R})
    elif shape == "cube":
        center = _point(doc, section, "center", dim)
        rho = doc.get_float(section, "rho")
        ratio = doc.get_float(section, "ratio", settings.annulus_ratio)
        obstacle = None
        if doc.has_section("domain"):
            descriptor = descriptor_from_config(doc)
            obstacle = lambda pts: ~descriptor.contains(pts)  # noqa: E731
            payload["domain"] = descriptor.describe()
        condenser = cube_condenser(center, rho, p, cells, ratio, obstacle)
        payload.update({"center": list(center), "rho": rho, "ratio": ratio})
    else:
        raise ConfigError(f"unknown condenser shape {shape!r}; expected ball or cube", field=f"{section}.shape",
                          line=doc.section(section)["shape"].line)

    result = p_capacity(condenser, settings)
    payload.update(result.to_dict())
    passed = True
    if oracle is not None:
        tolerance = doc.get_float(section, "oracle_tolerance", 0.02)
        error = abs(result.value - oracle) / oracle
        passed = error <= tolerance
        payload.update({"oracle": oracle, "relative_error": error, "oracle_tolerance": tolerance,
                        "passed": passed})
    write_json(ctx.output("capacity.json"), payload)
    write_rows(ctx.output("capacity.csv"), ["shape", "dim", "p", "cells", "value", "iterations", "residual",
                                            "oracle"],
               [[shape, dim, p, cells, result.value, result.iterations, result.energy_residual,
                 oracle if oracle is not None else ""]])
    logger.info("Capacity computed", value=result.value, oracle=oracle)
    return EXIT_PASS if passed else EXIT_FAIL


def _profile_from_doc(doc: ConfigDocument, ctx: CommandContext) -> CapacityProfile:
    domain = domain_from_config(doc)
    section = "profile"
    x_o = _point(doc, section, "x_o", domain.dim)
    p = doc.get_float(section, "p")
    num_scales = doc.get_int(section, "num_scales", 4)
    rho_0 = doc.get_optional_float(section, "rho_0")
    settings = ctx.capacity_settings(doc)
    if doc.get_bool(section, "thickness", False):
        return thickness_profile(domain, x_o, p, num_scales, settings, rho_0)
    return capacity_profile(domain, x_o, p, num_scales, settings, rho_0)


def cmd_delta_profile(doc: ConfigDocument, ctx: CommandContext) -> int:
    profile = _profile_from_doc(doc, ctx)
    profile.to_csv(ctx.output("profile.csv"))
    write_json(ctx.output("profile.json"), profile.to_dict())
    if ctx.svg:
        line_chart(ctx.output("profile.svg"), profile.scales, {"delta": profile.deltas}, "rho", "delta(rho)",
                   logx=True)
    return EXIT_PASS


def cmd_qo(doc: ConfigDocument, ctx: CommandContext) -> int:
    section = "harnack"
    p = doc.get_float(section, "p")
    dim = doc.get_int(section, "dim", 2)
    allow = doc.get_bool(section, "allow_supercritical", False)
    r = doc.get_optional_float(section, "r")
    r_value = r if r is not None else optimal_r(p, dim, allow)
    params = qo_exponent(p, dim, r_value, doc.get_str(section, "d_mode", "prototype"),
                         doc.get_optional_float(section, "d"), allow)
    payload = {**params.to_dict(), "p_star": critical_exponent(dim), "r_auto": r is None,
               "conjectured_q_o": params.conjectured_q_o}
    gamma = doc.get_optional_float(section, "gamma")
    if gamma is not None:
        payload["c1"] = c1_constant(dim, p, gamma)
    write_json(ctx.output("qo.json"), payload)
    return EXIT_PASS


def cmd_wiener(doc: ConfigDocument, ctx: CommandContext) -> int:
    """Profile from ``[wiener] profile = file.csv`` or computed from ``[domain]`` and ``[profile]``"""
    section = "wiener"
    if doc.has(section, "profile"):
        path = ctx.resolve(doc.get_str(section, "profile"))
        if not path.exists():
            raise ConfigError(f"profile file {str(path)!r} does not exist", field=f"{section}.profile",
                              line=doc.section(section)["profile"].line)
        ctx.manifest.add_input(path)
        p = doc.get_float(section, "p")
        profile = CapacityProfile.from_csv(path, doc.get_floats(section, "x_o", (0.0,)), p)
    else:
        profile = _profile_from_doc(doc, ctx)
        p = profile.p

    q_o = doc.get_optional_float(section, "q_o")
    if q_o is None:
        dim = doc.get_int(section, "dim", len(profile.x_o))
        allow = doc.get_bool("harnack", "allow_supercritical", False)
        r = doc.get_optional_float("harnack", "r")
        target = qo_exponent(p, dim, r if r is not None else optimal_r(p, dim, allow),
                             doc.get_str("harnack", "d_mode", "prototype"), doc.get_optional_float("harnack", "d"),
                             allow)
    else:
        target = q_o
    criteria = Criteria.from_config(doc)
    report = modulus_and_reference(profile, target, doc.get_float(section, "alpha", 1.0),
                                   doc.get_float(section, "c", 0.1), doc.get_float(section, "omega_o", 1.0), p,
                                   criteria.fat_floor, criteria.fat_collapse, criteria.slope_fraction)
    report.to_csv(ctx.output("wiener.csv"))
    report.to_json(ctx.output("wiener.json"))
    if ctx.svg:
        taus = [row.tau for row in report.rows]
        line_chart(ctx.output("wiener.svg"), taus, {"modulus": [row.modulus for row in report.rows]},
                   "tau", "omega_bar", logx=True)
    return EXIT_PASS


def cmd_solve(doc: ConfigDocument, ctx: CommandContext) -> int:
    domain = domain_from_config(doc)
    model = FluxModel.from_config(doc, domain.dim)
    settings = SolverSettings.from_config(doc)
    horizon = doc.get_float("run", "horizon")
    traj = solve_cauchy_dirichlet(domain, model, domain.datum, horizon, settings)

    traj.save_checkpoint(ctx.output("trajectory.bin"))
    sups, masses = traj.sup_norms(), traj.masses()
    write_rows(ctx.output("norms.csv"), ["t", "sup_abs", "mass"],
               [[t, float(s), float(m)] for t, s, m in zip(traj.times, sups, masses)])
    traj.export_slice_csv(ctx.output("final_slice.csv"), traj.t_final)
    domain.to_pgm(ctx.output("domain.pgm"))

    payload: dict[str, Any] = {"times": len(traj.times), "t_final": traj.t_final, "dt": traj.dt,
                               "epsilon": traj.epsilon, "domain": domain.describe(), **traj.metadata,
                               "max_sup": float(sups.max())}
    if domain.datum.holder_exponent is not None:
        points = domain.points()[(~domain.inside).ravel()] if domain.has_complement else domain.points()
        radii = [4 * domain.h, 8 * domain.h]
        payload["sampled_holder_constant"] = sampled_holder_constant(domain.datum, points, radii, seed=ctx.seed)
    write_json(ctx.output("solve.json"), payload)
    if ctx.svg:
        line_chart(ctx.output("norms.svg"), traj.times, {"sup |u|": list(sups)}, "t", "sup |u|")
    return EXIT_PASS


def _decay_outputs(report: VerifierReport, ctx: CommandContext):
    report.to_csv(ctx.output("verify.csv"))
    report.to_json(ctx.output("verify.json"))
    if ctx.svg and report.rows:
        integrals = [row.integral for row in report.rows]
        line_chart(ctx.output("verify.svg"), integrals,
                   {"omega": [row.omega for row in report.rows], "bound": [row.rhs for row in report.rows]},
                   "Wiener integral", "oscillation", logy=True)


def cmd_verify(doc: ConfigDocument, ctx: CommandContext) -> int:
    cfg = ExperimentConfig.from_config(doc)
    if ctx.workers is not None:
        cfg = replace(cfg, capacity=replace(cfg.capacity, workers=ctx.workers))
    if doc.kind == "pfat-holder":
        holder = check_pfat_holder(cfg)
        holder.to_csv(ctx.output("holder.csv"))
        holder.to_json(ctx.output("holder.json"))
        if ctx.svg:
            line_chart(ctx.output("holder.svg"), holder.scales, {"omega": holder.omegas}, "rho", "oscillation",
                       logx=True, logy=True)
        return EXIT_PASS if holder.passed else EXIT_FAIL
    report = verify_with_refinement(cfg) if ctx.refine else verify_boundary_decay(cfg)
    _decay_outputs(report, ctx)
    summary = {"status": report.status, "gamma_fit": report.gamma_fit, "correlation": report.correlation}
    logger.info("Verification finished", **summary)
    return EXIT_PASS if report.passed else EXIT_FAIL


def cmd_harnack_check(doc: ConfigDocument, ctx: CommandContext) -> int:
    cfg = HarnackCheckConfig.from_config(doc)
    report = run_harnack_suite(cfg)
    if ctx.refine:
        report.refinement = harnack_refinement(cfg)
    report.to_json(ctx.output("harnack.json"))
    if report.harnack_type is not None:
        rows = report.harnack_type.reports
        write_rows(ctx.output("harnack_type.csv"), ["rho", "theta", "sigma", "inf", "sup", "ratio", "contained"],
                   [[r.rho, r.theta, r.sigma, r.inf_value, r.sup_value, r.ratio, int(r.contained)] for r in rows])
    if report.l1 is not None:
        rows = report.l1.reports
        write_rows(ctx.output("l1_harnack.csv"), ["s1", "t1", "lhs", "inf_term", "time_term", "gamma_min"],
                   [[r.s1, r.t1, r.lhs, r.inf_term, r.time_term, r.gamma_min] for r in rows])
    if report.lower_bound is not None:
        rows = report.lower_bound.reports
        write_rows(ctx.output("lower_bound.csv"), ["rho", "eta", "k", "mu", "delta", "average_v", "ratio"],
                   [[r.rho, r.eta, r.k, r.mu, r.delta, r.average_v, r.ratio] for r in rows])
    return EXIT_PASS if report.passed else EXIT_FAIL


def cmd_extinction_check(doc: ConfigDocument, ctx: CommandContext) -> int:
    cfg = ExtinctionConfig.from_config(doc)
    report = check_extinction_window(cfg, ctx.workers)
    if ctx.refine:
        report.window_refinement, report.refinement = extinction_refinement(cfg)
    report.to_json(ctx.output("extinction.json"))
    write_rows(ctx.output("extinction.csv"), ["amplitude", "initial_average", "intrinsic_scale", "t_ext",
                                              "ratio", "window_end", "kappa_fit"],
               [[r.amplitude, r.initial_average, r.intrinsic_scale, r.t_ext if r.t_ext is not None else math.nan,
                 r.ratio if r.ratio is not None else math.nan, r.window_end, r.kappa_fit] for r in report.runs])
    return EXIT_PASS if report.passed else EXIT_FAIL


# (command, accepted config kinds, handler, help)
COMMANDS = {
    "capacity": (("capacity",), cmd_capacity, "p-capacity of a condenser, with the radial oracle for balls"),
    "delta-profile": (("delta-profile",), cmd_delta_profile, "capacity ratios delta(rho) on dyadic scales"),
    "qo": (("qo",), cmd_qo, "Harnack exponents lambda_r, d and q_o"),
    "wiener": (("wiener",), cmd_wiener, "Wiener integral, modulus and reference cylinders"),
    "solve": (("solve",), cmd_solve, "Cauchy-Dirichlet trajectory with checkpoint"),
    "verify": (("verify", "pfat-holder"), cmd_verify, "boundary decay or p-fat Holder verification"),
    "harnack-check": (("harnack",), cmd_harnack_check, "L1 Harnack, Harnack-type and lower-bound checks"),
    "extinction-check": (("extinction",), cmd_extinction_check, "extinction time and persistence window"),
}

