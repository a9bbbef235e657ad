# -*- coding: utf-8 -*-
# License: GNU General Public License v3

"""
Implicit Solver for the Parabolic p-Laplacian

Implicit Euler in time, regularized flux in space:

    (u - u_old) / dt + L(u) / h^N = f(., t + dt)

on inside cells away from the bounding faces; every other cell carries the
Dirichlet datum g(., t + dt). Each step is a damped Newton iteration with a
freshly assembled Jacobian. A step that fails is retried as two half steps.

Config section ``[solver]``::

    dt = 0.01
    tol = 1e-8
    max_newton = 40
    epsilon = auto
    max_halvings = 4
    dt_growth = 1.0
    dt_max = auto
    save_every = 1
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import spsolve

from wienerlab.capacity.stencil import GridStencil
from wienerlab.exceptions import SolverConvergenceError
from wienerlab.geometry.datum import BoundaryDatum
from wienerlab.geometry.domain import DomainMask
from wienerlab.logger import log_action
from wienerlab.pde.structure import FluxModel
from wienerlab.pde.trajectory import Trajectory
from wienerlab.utils.config import ConfigDocument
from wienerlab.utils.logging import get_logger
from wienerlab.utils.metrics import metrics, record_newton_step
from wienerlab.utils.resilience import finite_or_raise, retry_with_halving
from wienerlab.utils.validators import Validator, validate_or_raise

logger = get_logger("wienerlab.pde")

Source = Callable[[np.ndarray, float], np.ndarray]


@dataclass(frozen=True)
class SolverSettings:
    dt: float = 0.01
    tol: float = 1e-8
    max_newton: int = 40
    epsilon: float | None = None
    max_halvings: int = 4
    dt_growth: float = 1.0
    dt_max: float | None = None
    save_every: int = 1
    scheme: str = "symmetric"

    def validate(self) -> SolverSettings:
        validate_or_raise(
            Validator().field("dt", self.dt).positive().validate(),
            Validator().field("tol", self.tol).positive().validate(),
            Validator().field("max_newton", self.max_newton).at_least(1).validate(),
            Validator().field("epsilon", self.epsilon).optional().positive().validate(),
            Validator().field("max_halvings", self.max_halvings).non_negative().validate(),
            Validator().field("dt_growth", self.dt_growth).at_least(1.0).validate(),
            Validator().field("dt_max", self.dt_max).optional().positive().validate(),
            Validator().field("save_every", self.save_every).at_least(1).validate(),
        )
        return self

    @classmethod
    def from_config(cls, doc: ConfigDocument, section: str = "solver") -> SolverSettings:
        base = cls()
        return cls(
            dt=doc.get_float(section, "dt", base.dt),
            tol=doc.get_float(section, "tol", base.tol),
            max_newton=doc.get_int(section, "max_newton", base.max_newton),
            epsilon=doc.get_optional_float(section, "epsilon"),
            max_halvings=doc.get_int(section, "max_halvings", base.max_halvings),
            dt_growth=doc.get_float(section, "dt_growth", base.dt_growth),
            dt_max=doc.get_optional_float(section, "dt_max"),
            save_every=doc.get_int(section, "save_every", base.save_every),
            scheme=doc.get_str(section, "scheme", base.scheme),
        ).validate()


class ImplicitStepper:
    """Reusable operators for one (domain, model, settings) triple"""

    def __init__(self, domain: DomainMask, model: FluxModel, settings: SolverSettings,
                 datum: BoundaryDatum | None = None, source: Source | None = None):
        if model.dim != domain.dim:
            raise ValueError(f"model dimension {model.dim} does not match the domain ({domain.dim})")
        self.domain = domain
        self.model = model
        self.settings = settings.validate()
        self.datum = datum if datum is not None else domain.datum
        self.source = source
        self.stencil = GridStencil(domain.shape, domain.h, settings.scheme)
        self.epsilon = settings.epsilon if settings.epsilon is not None else domain.h
        self.points = domain.points()
        self.unknown = (domain.inside & ~domain.outer_layer()).ravel()
        self.cell_volume = domain.h ** domain.dim
        self.coefficients = model.coefficient_fields(self.points, domain.inside, domain.shape)

    def boundary_values(self, t: float) -> np.ndarray:
        return self.datum(self.points, t)

    def residual(self, u: np.ndarray, u_old: np.ndarray, dt: float, forcing: np.ndarray | None) -> np.ndarray:
        op = self.stencil.operator(u, self.model.p, self.epsilon, self.coefficients) / self.cell_volume
        res = (u - u_old) + dt * op
        if forcing is not None:
            res = res - dt * forcing
        return res[self.unknown]

    def step(self, state: np.ndarray, t: float, dt: float) -> np.ndarray:
        """One implicit Euler step from ``t`` to ``t + dt``.

        Raises:
            SolverConvergenceError: Newton did not reach the tolerance.
        """
        u_old = np.ravel(state).astype(float)
        t_new = t + dt
        u = u_old.copy()
        u[~self.unknown] = self.boundary_values(t_new)[~self.unknown]
        forcing = self.source(self.points, t_new) if self.source is not None else None

        identity = sp.identity(int(self.unknown.sum()), format="csr")
        target = self.settings.tol * max(1.0, float(np.abs(u_old).max(initial=0.0)))
        res = self.residual(u, u_old, dt, forcing)
        history = [float(np.abs(res).max(initial=0.0))]
        iterations = 0
        while history[-1] > target:
            if iterations >= self.settings.max_newton:
                record_newton_step(iterations, converged=False)
                raise SolverConvergenceError(
                    f"Newton did not converge in {iterations} iterations at t={t_new:.6g}",
                    residuals=history, dt=dt)
            jac = self.stencil.jacobian(u, self.model.p, self.epsilon, self.coefficients)
            jac = jac[self.unknown][:, self.unknown] * (dt / self.cell_volume)
            delta = spsolve(sp.csc_matrix(identity + jac), res)
            finite_or_raise(delta, "Newton update", dt)

            damping = 1.0
            while True:
                trial = u.copy()
                trial[self.unknown] -= damping * delta
                trial_res = self.residual(trial, u_old, dt, forcing)
                norm = float(np.abs(trial_res).max(initial=0.0))
                if norm < history[-1] or damping < 1.0 / 64:
                    break
                damping *= 0.5
            u, res = trial, trial_res
            history.append(norm)
            iterations += 1

        record_newton_step(iterations, converged=True)
        logger.solver_event("step", t=t_new, dt=dt, iterations=iterations, residual=history[-1])
        return u.reshape(self.domain.shape)


def step(state: np.ndarray, t: float, dt: float, domain: DomainMask, model: FluxModel,
         settings: SolverSettings | None = None, source: Source | None = None) -> np.ndarray:
    """One implicit step with automatic dt halving on Newton failure"""
    settings = (settings or SolverSettings()).validate()
    stepper = ImplicitStepper(domain, model, settings, source=source)
    return advance_with_retry(stepper, state, t, dt)


def advance_with_retry(stepper: ImplicitStepper, state: np.ndarray, t: float, dt: float) -> np.ndarray:
    @retry_with_halving(max_halvings=stepper.settings.max_halvings)
    def advance(u: np.ndarray, t0: float, h: float) -> np.ndarray:
        return stepper.step(u, t0, h)

    return advance(state, t, dt)


def time_grid(T: float, settings: SolverSettings, t0: float = 0.0) -> list[float]:
    """Step end times; constant steps are t0 + k dt"""
    times = [t0]
    if settings.dt_growth == 1.0 and settings.dt_max is None:
        count = int(np.ceil((T - t0) / settings.dt - 1e-9))
        times.extend(t0 + k * settings.dt for k in range(1, count + 1))
        # a final partial step lands on T; a full one keeps k dt so longer runs share the prefix
        if times[-1] > T + 1e-9 * settings.dt:
            times[-1] = T
        return times
    dt = settings.dt
    t = t0
    while t < T - 1e-12:
        t = min(t + dt, T)
        times.append(t)
        dt = dt * settings.dt_growth
        if settings.dt_max is not None:
            dt = min(dt, settings.dt_max)
    return times


@log_action("Solve Cauchy-Dirichlet")
def solve_cauchy_dirichlet(
    domain: DomainMask,
    model: FluxModel,
    g: BoundaryDatum | None,
    T: float,
    settings: SolverSettings | None = None,
    source: Source | None = None,
    initial: np.ndarray | None = None
) -> Trajectory:
    """Trajectory on [0, T] with u(., 0) = g(., 0) (or ``initial``).

    Raises:
        SolverConvergenceError: a step failed after all halvings.
    """
    settings = (settings or SolverSettings()).validate()
    validate_or_raise(Validator().field("T", T).positive().validate())
    stepper = ImplicitStepper(domain, model, settings, datum=g, source=source)

    if initial is not None:
        u = np.asarray(initial, dtype=float).reshape(domain.shape).copy()
    else:
        u = stepper.boundary_values(0.0).reshape(domain.shape)

    grid = time_grid(T, settings)
    times, fields = [grid[0]], [u.copy()]
    with metrics.timer("solve", tags={"grid_n": domain.grid_n}):
        for k in range(1, len(grid)):
            u = advance_with_retry(stepper, u, grid[k - 1], grid[k] - grid[k - 1])
            if k % settings.save_every == 0 or k == len(grid) - 1:
                times.append(grid[k])
                fields.append(u.copy())

    logger.info("Trajectory computed", steps=len(grid) - 1, stored=len(times), T=T, p=model.p)
    return Trajectory(domain, times, fields, settings.dt, stepper.epsilon,
                      {"model": model.describe(), "datum": stepper.datum.describe(), "T": T})
