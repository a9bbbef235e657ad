# -*- coding: utf-8 -*-
# License: GNU General Public License v3

"""
Test Utilities for wienerlab

Factory functions for small domains, trajectories, profiles and config
documents, so tests stay on coarse grids and never touch the filesystem
unless they ask for a temporary directory.
"""

from __future__ import annotations

import math
import tempfile
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Iterator

import numpy as np

from wienerlab.capacity.profile import CapacityProfile
from wienerlab.geometry.datum import BoundaryDatum, ramp_datum, zero_datum
from wienerlab.geometry.descriptors import FullCube, HalfSpace, Spike
from wienerlab.geometry.domain import DomainMask, build_domain
from wienerlab.pde.trajectory import Trajectory
from wienerlab.utils.config import ConfigDocument, parse_config


# Domain factories

def make_half_space_domain(grid_n: int = 32, datum: BoundaryDatum | None = None, offset: float = 0.0) -> DomainMask:
    """E = {x_1 < offset} in [-1, 1]^2"""
    return build_domain(HalfSpace(2, axis=0, offset=offset), grid_n, datum=datum or zero_datum())


def make_spike_domain(grid_n: int = 32, beta: float = math.pi / 2, datum: BoundaryDatum | None = None) -> DomainMask:
    return build_domain(Spike(2, beta=beta), grid_n, datum=datum or zero_datum())


def make_full_cube_domain(grid_n: int = 32, dim: int = 2) -> DomainMask:
    return build_domain(FullCube(dim), grid_n)


def make_ramp_datum() -> BoundaryDatum:
    """The ramp used by the bundled decay configs"""
    return ramp_datum(axis=0, slope=-1.0, offset=-0.25)


# Trajectory factories

def make_constant_trajectory(
    domain: DomainMask,
    value: float = 1.0,
    times=(0.0, 0.5, 1.0),
    p: float = 1.5
) -> Trajectory:
    """u = value inside E, 0 on the complement, at every stored time"""
    field = np.where(domain.inside, float(value), 0.0)
    return Trajectory(domain, [float(t) for t in times], [field.copy() for _ in times],
                      dt=float(times[1] - times[0]) if len(times) > 1 else 0.0,
                      metadata={"model": {"kind": "prototype", "p": p}})


def make_linear_trajectory(domain: DomainMask, slope: float = 1.0, times=(0.0, 0.5, 1.0)) -> Trajectory:
    """u(x, t) = slope * x_1 everywhere, constant in time"""
    field = slope * domain.points()[:, 0].reshape(domain.shape)
    return Trajectory(domain, [float(t) for t in times], [field.copy() for _ in times],
                      dt=float(times[1] - times[0]) if len(times) > 1 else 0.0)


# Profile factories

def make_profile(deltas, rho_0: float = 0.5, p: float = 1.5, x_o=(0.0, 0.0), ratio: float = 0.5) -> CapacityProfile:
    scales = [rho_0 * ratio ** j for j in range(len(deltas))]
    return CapacityProfile(tuple(x_o), p, scales, [float(d) for d in deltas])


# Config documents

def make_config(kind: str, sections: dict[str, dict[str, Any]], source: str = "<test>") -> ConfigDocument:
    """Render ``sections`` in the config format and parse it back.

    Usage:
        doc = make_config("solve", {"domain": {"kind": "full-cube", "grid_n": 16}, "model": {"p": 1.5}})
    """
    lines = [f"kind = {kind}"]
    for name, entries in sections.items():
        lines.append(f"[{name}]")
        for key, value in entries.items():
            if isinstance(value, (list, tuple)):
                value = ", ".join(str(v) for v in value)
            elif isinstance(value, bool):
                value = "true" if value else "false"
            lines.append(f"{key} = {value}")
    return parse_config("\n".join(lines) + "\n", source=source)


def write_config(directory: str | Path, name: str, kind: str, sections: dict[str, dict[str, Any]]) -> Path:
    path = Path(directory) / name
    path.write_text(make_config(kind, sections).text, encoding="utf-8")
    return path


@contextmanager
def temporary_directory() -> Iterator[Path]:
    with tempfile.TemporaryDirectory(prefix="wienerlab-test-") as tmp:
        yield Path(tmp)


# Assertions

def assert_relative_close(test_case, actual: float, expected: float, tolerance: float, msg: str | None = None):
    """``|actual - expected| <= tolerance * |expected|``"""
    error = abs(actual - expected) / abs(expected) if expected else abs(actual)
    test_case.assertLessEqual(error, tolerance, msg or f"{actual} vs {expected}: relative error {error:.3g}")


def assert_monotone(test_case, values, decreasing: bool = True, msg: str | None = None):
    pairs = list(zip(values, values[1:]))
    ok = all(b <= a for a, b in pairs) if decreasing else all(b >= a for a, b in pairs)
    test_case.assertTrue(ok, msg or f"not monotone: {list(values)}")
