# -*- coding: utf-8 -*-
# License: GNU General Public License v3

"""
Cubes and Backward Cylinders

Cubes are axis-aligned, ``K_rho(x_o) = {x : max_k |x_k - x_o,k| < rho}``,
edge 2 rho. Cylinders are backward in time: ``K x (t_end - duration, t_end]``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from wienerlab.utils.validators import Validator, validate_exponent, validate_or_raise


@dataclass(frozen=True)
class Cube:
    """Axis-aligned cube of half-edge ``half_edge`` centred at ``center``"""
    center: tuple[float, ...]
    half_edge: float

    def __post_init__(self):
        Validator().field("half_edge", self.half_edge).positive().validate().raise_if_invalid()
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))

    @property
    def dim(self) -> int:
        return len(self.center)

    @property
    def edge(self) -> float:
        return 2.0 * self.half_edge

    @property
    def volume(self) -> float:
        return self.edge ** self.dim

    def scaled(self, factor: float) -> Cube:
        return Cube(self.center, self.half_edge * factor)

    def contains(self, points: np.ndarray, closed: bool = True) -> np.ndarray:
        """Membership of ``points`` (shape ``(M, N)``)"""
        offset = np.abs(np.asarray(points, dtype=float) - np.asarray(self.center))
        dist = offset.max(axis=1) if offset.ndim == 2 else offset.max()
        if closed:
            return dist <= self.half_edge * (1 + 1e-12)
        return dist < self.half_edge

    def inside(self, other: Cube, tol: float = 1e-12) -> bool:
        """True when this cube lies in the closure of ``other``"""
        for a, b in zip(self.center, other.center):
            if abs(a - b) + self.half_edge > other.half_edge + tol:
                return False
        return True


@dataclass(frozen=True)
class Cylinder:
    """Backward space-time cylinder ``cube x (t_end - duration, t_end]``"""
    cube: Cube
    t_end: float
    duration: float

    def __post_init__(self):
        Validator().field("duration", self.duration).positive().validate().raise_if_invalid()

    @property
    def t_start(self) -> float:
        return self.t_end - self.duration

    def contains_time(self, t: np.ndarray | float, tol: float = 1e-12) -> np.ndarray | bool:
        """Half-open window membership; ``t_end`` is included"""
        return (t > self.t_start + tol) & (t <= self.t_end + tol)


def intrinsic_cylinder(x_o, t_o: float, rho: float, omega_o: float, c: float, p: float) -> Cylinder:
    """Intrinsic cylinder ``K_rho(x_o) x (t_o - c/2 omega_o^{2-p} rho^p, t_o]``.

    Raises:
        ValidationError: for p outside (1, 2) or non-positive rho, omega_o, c.
    """
    validate_or_raise(
        validate_exponent(p),
        Validator().field("rho", rho).positive().validate(),
        Validator().field("omega_o", omega_o).positive().validate(),
        Validator().field("c", c).between(0, 1, open_left=True, open_right=True).validate(),
    )
    duration = 0.5 * c * omega_o ** (2 - p) * rho ** p
    return Cylinder(Cube(tuple(x_o), rho), float(t_o), duration)


def working_cylinder(x_o, t_o: float, radius: float, p: float, factor: float = 2.0) -> Cylinder:
    """Reference cylinder ``K_R(x_o) x (t_o - factor R^p, t_o]`` used for omega_o"""
    return Cylinder(Cube(tuple(x_o), radius), float(t_o), factor * radius ** p)
