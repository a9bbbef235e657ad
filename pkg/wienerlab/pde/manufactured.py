# -*- coding: utf-8 -*-
# License: GNU General Public License v3

"""
Manufactured Solutions and Auxiliary Problems

u*(x, t) = e^{-t} sum_k b_k sin(x_k + c_k) is separable, so with
g_k = d_k u*, H_kk = d_kk u* and s = |g|^2 + eps^2 the regularized flux
divergence is

    div A_eps(Du*) = sum_k a_k s^{(p-4)/2} (s + (p-2) g_k^2) H_kk,

and f = u*_t - div A_eps(Du*) makes u* an exact solution. The same eps
is used by the solver.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from wienerlab.geometry.cube import Cube
from wienerlab.geometry.datum import BoundaryDatum, bump_datum, zero_datum
from wienerlab.geometry.descriptors import FullCube
from wienerlab.geometry.domain import DomainMask, build_domain
from wienerlab.logger import log_experiment
from wienerlab.pde.solver import SolverSettings, solve_cauchy_dirichlet
from wienerlab.pde.structure import FluxModel
from wienerlab.utils.logging import get_logger

logger = get_logger("wienerlab.pde.manufactured")


@dataclass(frozen=True)
class ManufacturedSolution:
    dim: int
    p: float
    amplitudes: tuple[float, ...] = ()
    phases: tuple[float, ...] = ()
    epsilon: float = 0.25
    coefficients: tuple[float, ...] = ()

    def __post_init__(self):
        if not self.amplitudes:
            object.__setattr__(self, "amplitudes", tuple(1.0 / (k + 1) for k in range(self.dim)))
        if not self.phases:
            object.__setattr__(self, "phases", tuple(0.3 + 0.2 * k for k in range(self.dim)))
        if not self.coefficients:
            object.__setattr__(self, "coefficients", (1.0,) * self.dim)

    def exact(self, points: np.ndarray, t: float) -> np.ndarray:
        x = np.asarray(points, dtype=float)
        total = sum(b * np.sin(x[:, k] + c) for k, (b, c) in enumerate(zip(self.amplitudes, self.phases)))
        return math.exp(-t) * total

    def source(self, points: np.ndarray, t: float) -> np.ndarray:
        x = np.asarray(points, dtype=float)
        decay = math.exp(-t)
        grads = [decay * b * np.cos(x[:, k] + c) for k, (b, c) in enumerate(zip(self.amplitudes, self.phases))]
        hess = [-decay * b * np.sin(x[:, k] + c) for k, (b, c) in enumerate(zip(self.amplitudes, self.phases))]
        s = sum(g * g for g in grads) + self.epsilon ** 2
        divergence = sum(a * s ** ((self.p - 4) / 2) * (s + (self.p - 2) * g * g) * hkk
                         for a, g, hkk in zip(self.coefficients, grads, hess))
        return -self.exact(x, t) - divergence

    def datum(self) -> BoundaryDatum:
        return BoundaryDatum("manufactured", self.exact)

    def model(self) -> FluxModel:
        if all(a == 1.0 for a in self.coefficients):
            return FluxModel(self.p, self.dim)
        return FluxModel(self.p, self.dim, "diagonal-matrix", self.coefficients)


@dataclass
class ConvergenceReport:
    grid_sizes: list[int]
    time_steps: list[float]
    errors: list[float]
    orders: list[float] = field(default_factory=list)

    @property
    def monotone(self) -> bool:
        return all(b < a for a, b in zip(self.errors, self.errors[1:]))

    @property
    def passed(self) -> bool:
        return self.monotone

    @property
    def min_order(self) -> float:
        return min(self.orders) if self.orders else 0.0

    def to_dict(self) -> dict:
        return {"grid_sizes": self.grid_sizes, "time_steps": self.time_steps, "errors": self.errors,
                "orders": self.orders, "monotone": self.monotone}


@log_experiment("Manufactured-solution convergence")
def manufactured_convergence(
    solution: ManufacturedSolution,
    levels: list[tuple[int, float]],
    T: float = 0.5,
    half_edge: float = 1.0,
    settings: SolverSettings | None = None
) -> ConvergenceReport:
    """Max-norm error at T over inside cells for each (grid_n, dt) level.

    Orders are log(e_i / e_{i+1}) / log(dt_i / dt_{i+1}).
    """
    base = settings or SolverSettings()
    errors = []
    for grid_n, dt in levels:
        domain = build_domain(FullCube(solution.dim), grid_n, half_edge=half_edge, datum=solution.datum())
        run = solve_cauchy_dirichlet(domain, solution.model(), solution.datum(), T,
                                     replace(base, dt=dt, epsilon=solution.epsilon), source=solution.source)
        error = np.abs(run.at(T) - solution.exact(domain.points(), T).reshape(domain.shape))
        errors.append(float(error[domain.inside].max()))
        logger.info("Manufactured level solved", grid_n=grid_n, dt=dt, error=errors[-1])

    orders = [math.log(errors[i] / errors[i + 1]) / math.log(levels[i][1] / levels[i + 1][1])
              for i in range(len(levels) - 1) if errors[i + 1] > 0]
    return ConvergenceReport([n for n, _ in levels], [dt for _, dt in levels], errors, orders)


@dataclass
class AuxiliaryProblem:
    domain: DomainMask
    initial: np.ndarray = field(repr=False)
    x_o: tuple[float, ...]
    rho: float

    @property
    def initial_average(self) -> float:
        """Average of u_o over K_{2 rho}(x_o)"""
        region = self.domain.cube_mask(Cube(self.x_o, 2 * self.rho))
        return float(self.initial[region].mean())


def auxiliary_problem(domain: DomainMask, x_o, rho: float, amplitude: float = 1.0) -> AuxiliaryProblem:
    """Zero lateral data and a bump initial datum supported in K_{2 rho}(x_o) n E"""
    x_o = tuple(float(v) for v in x_o)
    bump = bump_datum(x_o, 2 * rho, amplitude)
    initial = np.where(domain.inside, bump(domain.points(), 0.0).reshape(domain.shape), 0.0)
    initial[domain.outer_layer()] = 0.0
    return AuxiliaryProblem(domain.with_datum(zero_datum()), initial, x_o, float(rho))
