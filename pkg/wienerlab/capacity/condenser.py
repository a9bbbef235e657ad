# -*- coding: utf-8 -*-
# License: GNU General Public License v3

"""
Condenser Capacities

``p_capacity`` minimizes the regularized discrete p-Dirichlet energy over
grid fields that equal 1 on the obstacle K and 0 on the boundary of Omega.
Omega is the grid box (outermost layer fixed to 0), optionally restricted
to a ``support`` mask. The reported value is the unregularized energy of
the minimizer.

Config section ``[capacity]``::

    method = nesterov     # nesterov | lbfgs
    scheme = symmetric    # symmetric | forward
    epsilon = auto        # defaults to the grid spacing
    tol = 1e-8
    max_iter = 50000
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.optimize import minimize
from scipy.sparse.linalg import spsolve

from wienerlab.capacity.stencil import SCHEMES, GridStencil
from wienerlab.exceptions import CapacityConvergenceError, GeometryError
from wienerlab.geometry.cube import Cube
from wienerlab.geometry.domain import cell_centers, grid_points
from wienerlab.logger import log_capacity_solved
from wienerlab.utils.config import ConfigDocument
from wienerlab.utils.logging import get_logger
from wienerlab.utils.metrics import record_capacity_solve
from wienerlab.utils.validators import Validator, validate_exponent, validate_or_raise

logger = get_logger("wienerlab.capacity")

METHODS = ("lbfgs", "nesterov")


@dataclass(frozen=True)
class CapacitySettings:
    """Solver and profile settings shared by every condenser of a run"""
    method: str = "nesterov"
    scheme: str = "symmetric"
    epsilon: float | None = None
    tol: float = 1e-8
    max_iter: int = 50000
    warm_start: bool = True
    sweep: int = 25
    annulus_ratio: float = 1.5
    scale_ratio: float = 0.5
    condenser_cells: int | None = None
    min_cells: float = 4.0
    workers: int | None = None

    def validate(self):
        validate_or_raise(
            Validator().field("method", self.method).in_list(list(METHODS)).validate(),
            Validator().field("scheme", self.scheme).in_list(list(SCHEMES)).validate(),
            Validator().field("epsilon", self.epsilon).optional().positive().validate(),
            Validator().field("tol", self.tol).positive().validate(),
            Validator().field("max_iter", self.max_iter).at_least(1).validate(),
            Validator().field("annulus_ratio", self.annulus_ratio).between(1, 4, open_left=True).validate(),
            Validator().field("scale_ratio", self.scale_ratio).between(0, 1, open_left=True,
                                                                        open_right=True).validate(),
            Validator().field("condenser_cells", self.condenser_cells).optional().at_least(8).validate(),
        )
        return self

    def cells_for(self, dim: int) -> int:
        if self.condenser_cells is not None:
            return int(self.condenser_cells)
        return {1: 96, 2: 48, 3: 24}[dim]

    @classmethod
    def from_config(cls, doc: ConfigDocument, section: str = "capacity") -> CapacitySettings:
        base = cls()
        cells = doc.get_str(section, "condenser_cells", "auto")
        return cls(
            method=doc.get_str(section, "method", base.method).lower(),
            scheme=doc.get_str(section, "scheme", base.scheme).lower(),
            epsilon=doc.get_optional_float(section, "epsilon"),
            tol=doc.get_float(section, "tol", base.tol),
            max_iter=doc.get_int(section, "max_iter", base.max_iter),
            warm_start=doc.get_bool(section, "warm_start", base.warm_start),
            sweep=doc.get_int(section, "sweep", base.sweep),
            annulus_ratio=doc.get_float(section, "annulus_ratio", base.annulus_ratio),
            scale_ratio=doc.get_float(section, "scale_ratio", base.scale_ratio),
            condenser_cells=None if cells.lower() == "auto" else doc.get_int(section, "condenser_cells"),
            min_cells=doc.get_float(section, "min_cells", base.min_cells),
            workers=doc.get_int(section, "workers") if doc.has(section, "workers") else None,
        ).validate()


@dataclass
class Condenser:
    """Obstacle ``inner`` in the grid box ``outer`` (cell spacing ``h``)"""
    inner: np.ndarray
    outer: Cube
    p: float
    support: np.ndarray | None = None

    def __post_init__(self):
        self.inner = np.asarray(self.inner, dtype=bool)
        validate_or_raise(validate_exponent(self.p))
        if self.support is not None and self.support.shape != self.inner.shape:
            raise GeometryError("support mask shape does not match the obstacle")
        if len(set(self.inner.shape)) != 1 or self.inner.ndim != self.outer.dim:
            raise GeometryError(f"condenser grid {self.inner.shape} must be a cube of dimension {self.outer.dim}")
        if (self.inner & self.fixed_zero()).any():
            raise GeometryError("obstacle K touches the boundary of Omega")

    @property
    def shape(self) -> tuple[int, ...]:
        return self.inner.shape

    @property
    def h(self) -> float:
        return self.outer.edge / self.shape[0]

    def fixed_zero(self) -> np.ndarray:
        zero = np.zeros(self.shape, dtype=bool)
        for axis in range(self.inner.ndim):
            index = [slice(None)] * self.inner.ndim
            index[axis] = 0
            zero[tuple(index)] = True
            index[axis] = -1
            zero[tuple(index)] = True
        if self.support is not None:
            zero |= ~self.support
        return zero

    def free(self) -> np.ndarray:
        return ~(self.inner | self.fixed_zero())

    def points(self) -> np.ndarray:
        return grid_points(cell_centers(self.outer.center, self.outer.half_edge, self.shape[0]))


@dataclass
class CapacityResult:
    value: float
    iterations: int
    energy_residual: float
    minimizer: np.ndarray = field(repr=False)
    method: str = "nesterov"
    regularized_energy: float = 0.0

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "iterations": self.iterations,
            "energy_residual": self.energy_residual,
            "method": self.method,
            "regularized_energy": self.regularized_energy,
        }


def cube_condenser(center, rho: float, p: float, cells: int, ratio: float = 1.5, obstacle=None) -> Condenser:
    """Condenser (K_rho, K_{ratio rho}) on ``cells`` cells per axis.

    ``obstacle(points) -> bool`` further restricts K (e.g. to the complement
    of E).
    """
    outer = Cube(tuple(center), ratio * rho)
    points = grid_points(cell_centers(outer.center, outer.half_edge, cells))
    inner = Cube(tuple(center), rho).contains(points)
    if obstacle is not None:
        inner &= obstacle(points)
    return Condenser(inner.reshape((cells,) * outer.dim), outer, p)


def ball_condenser(dim: int, r: float, R: float, p: float, cells: int, margin: float = 1.05) -> Condenser:
    """Concentric balls B_r in B_R, centred at the origin.

    Membership radii are shifted by half a cell (r + h/2 inside, R - h/2
    outside) so the staircase boundaries straddle the true spheres.
    """
    if not 0 < r < R:
        raise GeometryError(f"need 0 < r < R, got r={r}, R={R}")
    outer = Cube((0.0,) * dim, margin * R)
    h = outer.edge / cells
    radius = np.linalg.norm(grid_points(cell_centers(outer.center, outer.half_edge, cells)), axis=1)
    shape = (cells,) * dim
    inner = (radius <= r + 0.5 * h).reshape(shape)
    support = (radius < R - 0.5 * h).reshape(shape)
    return Condenser(inner, outer, p, support)


def _assemble(condenser: Condenser, x: np.ndarray) -> np.ndarray:
    u = condenser.inner.astype(float).ravel()
    u[condenser.free().ravel()] = x
    return u


def linear_potential(condenser: Condenser, stencil: GridStencil) -> np.ndarray:
    """p = 2 condenser potential on the free cells, clipped to [0, 1]"""
    free = condenser.free().ravel()
    fixed_one = condenser.inner.ravel()
    lap = stencil.laplacian()
    a_ff = lap[free][:, free]
    rhs = -(lap[free][:, fixed_one] @ np.ones(int(fixed_one.sum())))
    x = spsolve(sp.csc_matrix(a_ff), rhs)
    return np.clip(np.atleast_1d(x), 0.0, 1.0)


def _lbfgs(objective, x0: np.ndarray, settings: CapacitySettings) -> tuple[np.ndarray, int, float]:
    scale = max(objective(x0)[0], np.finfo(float).tiny)
    history: list[float] = []

    def normalized(x):
        f, g = objective(x)
        return f / scale, g / scale

    def record(xk):
        history.append(objective(xk)[0] / scale)

    res = minimize(
        normalized, x0, jac=True, method="L-BFGS-B",
        bounds=[(0.0, 1.0)] * len(x0), callback=record,
        options={"maxiter": settings.max_iter, "maxfun": 20 * settings.max_iter,
                 "ftol": settings.tol, "gtol": 0.0},
    )
    residual = 0.0
    if len(history) >= 2:
        residual = abs(history[-2] - history[-1]) / max(abs(history[-1]), np.finfo(float).tiny)
    if res.status == 1:
        raise CapacityConvergenceError(f"L-BFGS-B did not converge: {res.message}", residual, int(res.nit))
    if not res.success:
        # line-search stalls at machine precision are accepted; anything else is not
        if residual > settings.tol * 10:
            raise CapacityConvergenceError(f"L-BFGS-B stopped: {res.message}", residual, int(res.nit))
        logger.debug("L-BFGS-B stopped at precision limit", message=str(res.message), residual=residual)
    return np.asarray(res.x), int(res.nit), residual


def _nesterov(objective, x0: np.ndarray, settings: CapacitySettings) -> tuple[np.ndarray, int, float]:
    """Accelerated projected gradient with backtracking and adaptive restart"""
    x = np.clip(x0, 0.0, 1.0)
    y = x.copy()
    f_x = objective(x)[0]
    step = 1.0
    momentum = 1.0
    sweep_start = f_x
    residual = np.inf
    for it in range(1, settings.max_iter + 1):
        f_y, g_y = objective(y)
        while True:
            candidate = np.clip(y - step * g_y, 0.0, 1.0)
            diff = candidate - y
            f_c = objective(candidate)[0]
            if f_c <= f_y + g_y @ diff + (diff @ diff) / (2 * step) + 1e-15 * abs(f_y):
                break
            step *= 0.5
            if step < 1e-30:
                raise CapacityConvergenceError("backtracking step underflow", float(residual), it)
        if f_c > f_x:
            # restart momentum
            momentum = 1.0
            y = x.copy()
            continue
        next_momentum = 0.5 * (1 + np.sqrt(1 + 4 * momentum ** 2))
        y = candidate + ((momentum - 1) / next_momentum) * (candidate - x)
        x, f_x, momentum = candidate, f_c, next_momentum
        step *= 1.5
        if it % settings.sweep == 0:
            residual = (sweep_start - f_x) / max(abs(f_x), np.finfo(float).tiny)
            if residual < settings.tol:
                return x, it, float(residual)
            sweep_start = f_x
    raise CapacityConvergenceError("accelerated descent hit the iteration budget", float(residual),
                                   settings.max_iter)


def p_capacity(condenser: Condenser, settings: CapacitySettings | None = None) -> CapacityResult:
    """Discrete p-capacity of ``condenser``.

    Raises:
        CapacityConvergenceError: iteration budget exhausted; carries the
            last relative energy decrease.
    """
    settings = (settings or CapacitySettings()).validate()
    if not condenser.inner.any():
        return CapacityResult(0.0, 0, 0.0, np.zeros(condenser.shape), settings.method)

    stencil = GridStencil(condenser.shape, condenser.h, settings.scheme)
    eps = settings.epsilon if settings.epsilon is not None else condenser.h
    p = condenser.p
    free = condenser.free().ravel()

    if not free.any():
        u = _assemble(condenser, np.zeros(0))
        value = stencil.energy(u, p)
        return CapacityResult(value, 0, 0.0, u.reshape(condenser.shape), settings.method,
                              stencil.energy(u, p, eps))

    def objective(x: np.ndarray) -> tuple[float, np.ndarray]:
        f, g = stencil.energy_and_gradient(_assemble(condenser, x), p, eps)
        return f, g[free]

    x0 = linear_potential(condenser, stencil) if settings.warm_start else np.zeros(int(free.sum()))

    start = time.perf_counter()
    if settings.method == "lbfgs":
        x, iterations, residual = _lbfgs(objective, x0, settings)
    else:
        x, iterations, residual = _nesterov(objective, x0, settings)
    elapsed_ms = (time.perf_counter() - start) * 1000

    u = np.clip(_assemble(condenser, x), 0.0, 1.0)
    value = stencil.energy(u, p)
    record_capacity_solve(settings.method, iterations, elapsed_ms)
    log_capacity_solved(value, iterations, residual, settings.method)
    return CapacityResult(value, iterations, residual, u.reshape(condenser.shape), settings.method,
                          stencil.energy(u, p, eps))

