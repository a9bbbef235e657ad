# -*- coding: utf-8 -*-
# License: GNU General Public License v3

"""
Geometry Descriptors

Continuum descriptions of E. Every descriptor answers ``contains(points)``
for an ``(M, N)`` array of points; masks are built by evaluating it at cell
centres. Descriptors are immutable and can be re-evaluated on any grid, which
is how capacity profiles resample small scales.

Config section ``[domain]``::

    kind = spike          # full-cube | half-space | spike | cusp | corkscrew | ball-complement | union
    dim = 2
    grid_n = 128
    center = 0, 0         # bounding cube centre
    half_edge = 1
    beta = 1.5708         # kind-specific keys follow
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from wienerlab.exceptions import ConfigError, GeometryError
from wienerlab.utils.config import ConfigDocument

DESCRIPTOR_KINDS = (
    "full-cube",
    "half-space",
    "spike",
    "cusp",
    "corkscrew",
    "ball-complement",
    "union",
)


def _unit(vector, dim: int) -> np.ndarray:
    v = np.asarray(vector, dtype=float).reshape(dim)
    norm = np.linalg.norm(v)
    if norm == 0:
        raise GeometryError("direction vector must be non-zero")
    return v / norm


@dataclass(frozen=True)
class GeometryDescriptor:
    """Base descriptor: E is the whole bounding cube"""
    dim: int

    kind = "full-cube"
    has_complement = False

    def contains(self, points: np.ndarray) -> np.ndarray:
        return np.ones(len(points), dtype=bool)

    def describe(self) -> dict:
        return {"kind": self.kind, "dim": self.dim}


class FullCube(GeometryDescriptor):
    pass


@dataclass(frozen=True)
class HalfSpace(GeometryDescriptor):
    """E = {x_axis < offset} (side ``below``) or {x_axis > offset} (side ``above``)"""
    axis: int = 0
    offset: float = 0.0
    side: str = "below"

    kind = "half-space"
    has_complement = True

    def __post_init__(self):
        if not 0 <= self.axis < self.dim:
            raise GeometryError(f"axis {self.axis} out of range for N={self.dim}")
        if self.side not in ("below", "above"):
            raise GeometryError(f"side must be 'below' or 'above', got {self.side!r}")

    def contains(self, points: np.ndarray) -> np.ndarray:
        x = np.asarray(points, dtype=float)[:, self.axis]
        return x < self.offset if self.side == "below" else x > self.offset

    def describe(self) -> dict:
        return {**super().describe(), "axis": self.axis, "offset": self.offset, "side": self.side}


@dataclass(frozen=True)
class Spike(GeometryDescriptor):
    """Outward spike: E is the open cone with vertex ``tip``, axis ``direction``
    and full opening angle ``beta``. The complement near the tip is the large
    exterior of the cone.
    """
    beta: float = math.pi / 2
    tip: tuple[float, ...] = ()
    direction: tuple[float, ...] = ()

    kind = "spike"
    has_complement = True

    def __post_init__(self):
        if not 0 < self.beta < math.pi:
            raise GeometryError(f"opening angle beta must lie in (0, pi), got {self.beta}")
        if not self.tip:
            object.__setattr__(self, "tip", (0.0,) * self.dim)
        if not self.direction:
            object.__setattr__(self, "direction", (-1.0,) + (0.0,) * (self.dim - 1))
        object.__setattr__(self, "direction", tuple(_unit(self.direction, self.dim)))

    def contains(self, points: np.ndarray) -> np.ndarray:
        rel = np.asarray(points, dtype=float) - np.asarray(self.tip)
        dist = np.linalg.norm(rel, axis=1)
        along = rel @ np.asarray(self.direction)
        return (dist > 0) & (along > dist * math.cos(self.beta / 2))

    def describe(self) -> dict:
        return {**super().describe(), "beta": self.beta, "tip": list(self.tip), "direction": list(self.direction)}


@dataclass(frozen=True)
class Cusp(GeometryDescriptor):
    """Slab with a thin exterior spike: complement = {x_1 >= 0, |x'| <= a x_1^kappa}.

    For kappa > 1 the relative width a rho^(kappa-1) of the complement shrinks
    with the scale, so the boundary point at the tip is not uniformly fat.
    In N = 1 the complement is the ray x_1 >= 0.
    """
    width: float = 0.5
    kappa: float = 2.0
    tip: tuple[float, ...] = ()

    kind = "cusp"
    has_complement = True

    def __post_init__(self):
        if self.width <= 0:
            raise GeometryError(f"cusp width must be positive, got {self.width}")
        if self.kappa < 1:
            raise GeometryError(f"cusp exponent kappa must be >= 1, got {self.kappa}")
        if not self.tip:
            object.__setattr__(self, "tip", (0.0,) * self.dim)

    def contains(self, points: np.ndarray) -> np.ndarray:
        rel = np.asarray(points, dtype=float) - np.asarray(self.tip)
        x1 = rel[:, 0]
        lateral = np.linalg.norm(rel[:, 1:], axis=1) if self.dim > 1 else np.zeros(len(rel))
        reach = self.width * np.power(np.clip(x1, 0, None), self.kappa)
        return ~((x1 >= 0) & (lateral <= reach))

    def describe(self) -> dict:
        return {**super().describe(), "width": self.width, "kappa": self.kappa, "tip": list(self.tip)}


@dataclass(frozen=True)
class Corkscrew(GeometryDescriptor):
    """Complement = closed balls of radius r_k / M centred at x_o + 0.75 r_k e,
    r_k = r_o 2^-k. Every dyadic scale below r_o holds a ball comparable to it.
    """
    M: float = 4.0
    r_o: float = 0.5
    x_o: tuple[float, ...] = ()
    direction: tuple[float, ...] = ()
    levels: int = 40

    kind = "corkscrew"
    has_complement = True

    def __post_init__(self):
        if self.M < 2:
            raise GeometryError(f"corkscrew constant M must be >= 2, got {self.M}")
        if self.r_o <= 0:
            raise GeometryError(f"r_o must be positive, got {self.r_o}")
        if not self.x_o:
            object.__setattr__(self, "x_o", (0.0,) * self.dim)
        if not self.direction:
            object.__setattr__(self, "direction", (1.0,) + (0.0,) * (self.dim - 1))
        object.__setattr__(self, "direction", tuple(_unit(self.direction, self.dim)))

    def balls(self) -> list[tuple[np.ndarray, float]]:
        base = np.asarray(self.x_o)
        e = np.asarray(self.direction)
        out = []
        for k in range(self.levels):
            r_k = self.r_o * 2.0 ** -k
            out.append((base + 0.75 * r_k * e, r_k / self.M))
        return out

    def contains(self, points: np.ndarray) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        rel = pts - np.asarray(self.x_o)
        outside = np.zeros(len(pts), dtype=bool)
        # x_o is a limit point of the balls
        outside |= np.linalg.norm(rel, axis=1) == 0
        for center, radius in self.balls():
            outside |= np.linalg.norm(pts - center, axis=1) <= radius
        return ~outside

    def describe(self) -> dict:
        return {**super().describe(), "M": self.M, "r_o": self.r_o, "x_o": list(self.x_o),
                "direction": list(self.direction)}


@dataclass(frozen=True)
class BallComplement(GeometryDescriptor):
    """Complement = closed ball; E is its exterior (exterior-ball condition)"""
    center: tuple[float, ...] = ()
    radius: float = 0.5

    kind = "ball-complement"
    has_complement = True

    def __post_init__(self):
        if self.radius <= 0:
            raise GeometryError(f"ball radius must be positive, got {self.radius}")
        if not self.center:
            object.__setattr__(self, "center", (self.radius,) + (0.0,) * (self.dim - 1))

    def contains(self, points: np.ndarray) -> np.ndarray:
        rel = np.asarray(points, dtype=float) - np.asarray(self.center)
        return np.linalg.norm(rel, axis=1) > self.radius

    def describe(self) -> dict:
        return {**super().describe(), "center": list(self.center), "radius": self.radius}


@dataclass(frozen=True)
class Union(GeometryDescriptor):
    """E = union of open balls and open cubes"""
    balls: tuple[tuple[tuple[float, ...], float], ...] = field(default_factory=tuple)
    cubes: tuple[tuple[tuple[float, ...], float], ...] = field(default_factory=tuple)

    kind = "union"
    has_complement = True

    def __post_init__(self):
        if not self.balls and not self.cubes:
            raise GeometryError("union descriptor needs at least one ball or cube")
        for center, radius in (*self.balls, *self.cubes):
            if len(center) != self.dim or radius <= 0:
                raise GeometryError(f"invalid union member {center}, {radius}")

    def contains(self, points: np.ndarray) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        inside = np.zeros(len(pts), dtype=bool)
        for center, radius in self.balls:
            inside |= np.linalg.norm(pts - np.asarray(center), axis=1) < radius
        for center, half_edge in self.cubes:
            inside |= np.abs(pts - np.asarray(center)).max(axis=1) < half_edge
        return inside

    def describe(self) -> dict:
        return {**super().describe(), "balls": [list(b) for b in self.balls],
                "cubes": [list(c) for c in self.cubes]}


def _point(doc: ConfigDocument, section: str, key: str, dim: int, default=None) -> tuple[float, ...]:
    if not doc.has(section, key):
        return tuple(default) if default is not None else ()
    values = doc.get_floats(section, key)
    if len(values) != dim:
        entry = doc.section(section)[key]
        raise ConfigError(f"expected {dim} coordinates, got {len(values)}", field=f"{section}.{key}",
                          line=entry.line)
    return values


def _members(doc: ConfigDocument, section: str, key: str, dim: int) -> tuple:
    """``cx, cy, r; cx, cy, r`` lists used by the union descriptor"""
    if not doc.has(section, key):
        return ()
    entry = doc.section(section)[key]
    members = []
    for chunk in entry.value.split(";"):
        if not chunk.strip():
            continue
        try:
            values = [float(v) for v in chunk.split(",")]
        except ValueError:
            raise ConfigError(f"malformed member {chunk.strip()!r}", field=f"{section}.{key}", line=entry.line)
        if len(values) != dim + 1:
            raise ConfigError(f"expected {dim} coordinates and a radius", field=f"{section}.{key}",
                              line=entry.line)
        members.append((tuple(values[:dim]), values[dim]))
    return tuple(members)


def descriptor_from_config(doc: ConfigDocument, section: str = "domain") -> GeometryDescriptor:
    """Build a descriptor from a ``[domain]`` style section"""
    kind = doc.get_str(section, "kind", "full-cube").lower()
    dim = doc.get_int(section, "dim", 2)
    if kind not in DESCRIPTOR_KINDS:
        line = doc.section(section)["kind"].line
        raise ConfigError(f"unknown domain kind {kind!r}; expected one of {', '.join(DESCRIPTOR_KINDS)}",
                          field=f"{section}.kind", line=line)
    try:
        if kind == "full-cube":
            return FullCube(dim)
        if kind == "half-space":
            return HalfSpace(dim, axis=doc.get_int(section, "axis", 0), offset=doc.get_float(section, "offset", 0.0),
                             side=doc.get_str(section, "side", "below"))
        if kind == "spike":
            return Spike(dim, beta=doc.get_float(section, "beta", math.pi / 2),
                         tip=_point(doc, section, "tip", dim), direction=_point(doc, section, "direction", dim))
        if kind == "cusp":
            return Cusp(dim, width=doc.get_float(section, "width", 0.5), kappa=doc.get_float(section, "kappa", 2.0),
                        tip=_point(doc, section, "tip", dim))
        if kind == "corkscrew":
            return Corkscrew(dim, M=doc.get_float(section, "m", 4.0), r_o=doc.get_float(section, "r_o", 0.5),
                             x_o=_point(doc, section, "x_o", dim), direction=_point(doc, section, "direction", dim))
        if kind == "ball-complement":
            return BallComplement(dim, center=_point(doc, section, "ball_center", dim),
                                  radius=doc.get_float(section, "radius", 0.5))
        return Union(dim, balls=_members(doc, section, "balls", dim), cubes=_members(doc, section, "cubes", dim))
    except GeometryError as e:
        raise ConfigError(e.message, field=f"{section}.kind", line=doc.section(section).get("kind").line
                          if doc.has(section, "kind") else None)
