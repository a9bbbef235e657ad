# -*- coding: utf-8 -*-
# License: GNU General Public License v3

"""
Boundary Data

``BoundaryDatum`` evaluates g(x, t) on arrays of points. When the regularity
of g is known, ``holder_exponent`` and ``holder_constant`` record
``osc_{B_rho} g <= C rho^beta``; ``modulus_bound`` turns that into omega_g.

Config section ``[datum]``::

    kind = ramp           # zero | constant | ramp | bump | holder
    axis = 0
    slope = -1
    offset = -0.25
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from wienerlab.exceptions import ConfigError
from wienerlab.utils.config import ConfigDocument

DATUM_KINDS = ("zero", "constant", "ramp", "bump", "holder")

Evaluator = Callable[[np.ndarray, float], np.ndarray]


@dataclass(frozen=True)
class BoundaryDatum:
    """g(x, t) with optional recorded Holder regularity"""
    kind: str
    evaluator: Evaluator
    holder_exponent: float | None = None
    holder_constant: float | None = None
    params: dict = field(default_factory=dict)

    def __call__(self, points: np.ndarray, t: float) -> np.ndarray:
        return np.asarray(self.evaluator(np.asarray(points, dtype=float), float(t)), dtype=float)

    def modulus_bound(self, radius: float) -> float | None:
        """Bound on the oscillation of g over balls of ``radius``"""
        if self.holder_exponent is None or self.holder_constant is None:
            return None
        return self.holder_constant * radius ** self.holder_exponent

    def scaled(self, factor: float) -> BoundaryDatum:
        """c * g, with the recorded constant scaled alike"""
        base = self.evaluator
        constant = None if self.holder_constant is None else abs(factor) * self.holder_constant
        return BoundaryDatum(self.kind, lambda x, t: factor * base(x, t), self.holder_exponent, constant,
                             {**self.params, "scale": factor * self.params.get("scale", 1.0)})

    def describe(self) -> dict:
        return {"kind": self.kind, "holder_exponent": self.holder_exponent,
                "holder_constant": self.holder_constant, **self.params}


def zero_datum() -> BoundaryDatum:
    return BoundaryDatum("zero", lambda x, t: np.zeros(len(x)), 1.0, 0.0)


def constant_datum(value: float) -> BoundaryDatum:
    return BoundaryDatum("constant", lambda x, t: np.full(len(x), float(value)), 1.0, 0.0, {"value": value})


def ramp_datum(
    axis: int = 0,
    slope: float = -1.0,
    offset: float = 0.0,
    cap: float = 1.0,
    time_amplitude: float = 0.0,
    time_frequency: float = 0.0
) -> BoundaryDatum:
    """g = clip(slope (x_axis - offset), 0, cap) * (1 + A sin(w t))

    With a negative slope the datum vanishes for x_axis >= offset and grows
    into x_axis < offset.
    """
    def evaluate(x: np.ndarray, t: float) -> np.ndarray:
        values = np.clip(slope * (x[:, axis] - offset), 0.0, cap)
        if time_amplitude:
            values = values * (1 + time_amplitude * math.sin(time_frequency * t))
        return values

    # Lipschitz: osc over a ball of radius rho is at most 2 rho |slope|
    constant = 2 * abs(slope) * (1 + abs(time_amplitude))
    return BoundaryDatum("ramp", evaluate, 1.0, constant,
                         {"axis": axis, "slope": slope, "offset": offset, "cap": cap,
                          "time_amplitude": time_amplitude, "time_frequency": time_frequency})


def bump_datum(center, radius: float, amplitude: float = 1.0) -> BoundaryDatum:
    """cos^2 bump supported in the cube K_radius(center)"""
    c = np.asarray(center, dtype=float)

    def evaluate(x: np.ndarray, t: float) -> np.ndarray:
        rel = (x - c) / radius
        inside = np.abs(rel).max(axis=1) < 1
        profile = np.prod(np.cos(0.5 * math.pi * np.clip(rel, -1, 1)) ** 2, axis=1)
        return np.where(inside, amplitude * profile, 0.0)

    lipschitz = abs(amplitude) * math.pi / (2 * radius) * math.sqrt(len(c))
    return BoundaryDatum("bump", evaluate, 1.0, 2 * lipschitz,
                         {"center": list(c), "radius": radius, "amplitude": amplitude})


def holder_datum(x_o, beta: float, amplitude: float = 1.0) -> BoundaryDatum:
    """g = amplitude |x - x_o|^beta, beta in (0, 1]"""
    if not 0 < beta <= 1:
        raise ValueError(f"Holder exponent must lie in (0, 1], got {beta}")
    c = np.asarray(x_o, dtype=float)

    def evaluate(x: np.ndarray, t: float) -> np.ndarray:
        return amplitude * np.linalg.norm(x - c, axis=1) ** beta

    return BoundaryDatum("holder", evaluate, beta, abs(amplitude) * 2 ** beta,
                         {"x_o": list(c), "beta": beta, "amplitude": amplitude})


def sampled_holder_constant(
    datum: BoundaryDatum,
    points: np.ndarray,
    radii,
    t: float = 0.0,
    samples: int = 64,
    seed: int = 0
) -> float:
    """Largest observed ``osc_{B_rho(y)} g / rho^beta`` over random centres ``y``.

    ``points`` are the sample locations (e.g. cell centres). Requires a
    recorded exponent.
    """
    if datum.holder_exponent is None:
        raise ValueError("datum has no recorded Holder exponent")
    pts = np.asarray(points, dtype=float)
    values = datum(pts, t)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for rho in radii:
        for idx in rng.integers(0, len(pts), size=min(samples, len(pts))):
            near = np.linalg.norm(pts - pts[idx], axis=1) <= rho
            osc = float(values[near].max() - values[near].min())
            worst = max(worst, osc / rho ** datum.holder_exponent)
    return worst


def datum_from_config(doc: ConfigDocument, section: str = "datum", dim: int = 2) -> BoundaryDatum:
    """Build a datum from a ``[datum]`` section; an absent section means g = 0"""
    if not doc.has_section(section):
        return zero_datum()
    kind = doc.get_str(section, "kind", "zero").lower()
    if kind not in DATUM_KINDS:
        raise ConfigError(f"unknown datum kind {kind!r}; expected one of {', '.join(DATUM_KINDS)}",
                          field=f"{section}.kind", line=doc.section(section)["kind"].line)
    scale = doc.get_float(section, "scale", 1.0)
    if kind == "zero":
        datum = zero_datum()
    elif kind == "constant":
        datum = constant_datum(doc.get_float(section, "value"))
    elif kind == "ramp":
        datum = ramp_datum(
            axis=doc.get_int(section, "axis", 0),
            slope=doc.get_float(section, "slope", -1.0),
            offset=doc.get_float(section, "offset", 0.0),
            cap=doc.get_float(section, "cap", 1.0),
            time_amplitude=doc.get_float(section, "time_amplitude", 0.0),
            time_frequency=doc.get_float(section, "time_frequency", 0.0),
        )
    elif kind == "bump":
        center = doc.get_floats(section, "center", (0.0,) * dim)
        datum = bump_datum(center, doc.get_float(section, "radius"), doc.get_float(section, "amplitude", 1.0))
    else:
        x_o = doc.get_floats(section, "x_o", (0.0,) * dim)
        beta = doc.get_float(section, "beta", 0.5)
        if not 0 < beta <= 1:
            raise ConfigError("Holder exponent must lie in (0, 1]", field=f"{section}.beta",
                              line=doc.section(section)["beta"].line)
        datum = holder_datum(x_o, beta, doc.get_float(section, "amplitude", 1.0))
    return datum.scaled(scale) if scale != 1.0 else datum
