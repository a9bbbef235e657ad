# -*- coding: utf-8 -*-
# License: GNU General Public License v3

"""
Trajectories

Time-indexed grid fields u(., t_k) on a domain mask, with checkpoint and
CSV export.

Checkpoint layout (little-endian, flat):

    b"WLTRAJ01"
    int32   dim, grid_n, n_times
    float64 h, half_edge, epsilon, center[dim]
    uint8   inside[grid_n^dim]
    float64 times[n_times]
    float64 fields[n_times, grid_n^dim]   (row-major)
"""

from __future__ import annotations

import csv
from bisect import bisect_left
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from wienerlab.exceptions import PreconditionError, WienerLabError
from wienerlab.geometry.cube import Cylinder
from wienerlab.geometry.domain import DomainMask

MAGIC = b"WLTRAJ01"


@dataclass
class Trajectory:
    """Fields on ``domain`` at increasing ``times``"""
    domain: DomainMask
    times: list[float]
    fields: list[np.ndarray] = field(repr=False)
    dt: float = 0.0
    epsilon: float = 0.0
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.times) != len(self.fields):
            raise ValueError("times and fields differ in length")
        if any(b <= a for a, b in zip(self.times, self.times[1:])):
            raise ValueError("trajectory times must be increasing")

    def __len__(self) -> int:
        return len(self.times)

    @property
    def t_final(self) -> float:
        return self.times[-1]

    def at(self, t: float) -> np.ndarray:
        """Linear interpolation in time; exact at stored times"""
        if not self.times[0] - 1e-12 <= t <= self.times[-1] + 1e-12:
            raise PreconditionError(f"t={t:.6g} outside the trajectory range [{self.times[0]:.6g}, "
                                    f"{self.times[-1]:.6g}]")
        k = bisect_left(self.times, t)
        if k < len(self.times) and abs(self.times[k] - t) <= 1e-12:
            return self.fields[k]
        if k == 0:
            return self.fields[0]
        if k >= len(self.times):
            return self.fields[-1]
        t0, t1 = self.times[k - 1], self.times[k]
        w = (t - t0) / (t1 - t0)
        return (1 - w) * self.fields[k - 1] + w * self.fields[k]

    def indices_in(self, t_start: float, t_end: float, tol: float = 1e-12) -> list[int]:
        """Stored times in (t_start, t_end]"""
        return [k for k, t in enumerate(self.times) if t_start + tol < t <= t_end + tol]

    def window_fields(self, t_start: float, t_end: float) -> list[np.ndarray]:
        """Stored fields in (t_start, t_end], or the interpolated field at t_end
        when no stored time falls in the window
        """
        idx = self.indices_in(t_start, t_end)
        if idx:
            return [self.fields[k] for k in idx]
        return [self.at(t_end)]

    def truncated(self, t_end: float) -> Trajectory:
        keep = [k for k, t in enumerate(self.times) if t <= t_end + 1e-12]
        return Trajectory(self.domain, [self.times[k] for k in keep], [self.fields[k] for k in keep],
                          self.dt, self.epsilon, dict(self.metadata))

    def sup_norms(self) -> np.ndarray:
        inside = self.domain.inside
        return np.array([float(np.abs(f[inside]).max()) for f in self.fields])

    def masses(self) -> np.ndarray:
        cell = self.domain.h ** self.domain.dim
        inside = self.domain.inside
        return np.array([float(f[inside].sum()) * cell for f in self.fields])

    def save_checkpoint(self, path: str | Path) -> Path:
        path = Path(path)
        d = self.domain
        with path.open("wb") as fh:
            fh.write(MAGIC)
            np.asarray([d.dim, d.grid_n, len(self.times)], dtype="<i4").tofile(fh)
            np.asarray([d.h, d.half_edge, self.epsilon, *d.center], dtype="<f8").tofile(fh)
            d.inside.astype(np.uint8).ravel().tofile(fh)
            np.asarray(self.times, dtype="<f8").tofile(fh)
            for f in self.fields:
                np.ascontiguousarray(f, dtype="<f8").ravel().tofile(fh)
        return path

    def export_slice_csv(self, path: str | Path, t: float) -> Path:
        """Field at time ``t`` along x_1, through the middle cell of the other axes"""
        u = self.at(t)
        d = self.domain
        coords = d.axes[0]
        selector = [slice(None)] + [d.grid_n // 2] * (d.dim - 1)
        values = u[tuple(selector)]
        inside = d.inside[tuple(selector)]
        path = Path(path)
        with path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["x", "u", "inside"])
            for x, v, flag in zip(coords, values, inside):
                writer.writerow([repr(float(x)), repr(float(v)), int(flag)])
        return path


def load_checkpoint(path: str | Path) -> Trajectory:
    """Read a checkpoint written by ``Trajectory.save_checkpoint``.

    The domain comes back without descriptor; the datum is not stored.
    """
    raw = Path(path).read_bytes()
    if not raw.startswith(MAGIC):
        raise WienerLabError(f"{path} is not a trajectory checkpoint", code="CHECKPOINT")
    offset = len(MAGIC)
    dim, grid_n, n_times = (int(v) for v in np.frombuffer(raw, "<i4", 3, offset))
    offset += 12
    header = np.frombuffer(raw, "<f8", 3 + dim, offset)
    offset += 8 * (3 + dim)
    _, half_edge, epsilon = (float(v) for v in header[:3])
    center = tuple(float(v) for v in header[3:])
    cells = grid_n ** dim
    inside = np.frombuffer(raw, np.uint8, cells, offset).astype(bool).reshape((grid_n,) * dim)
    offset += cells
    times = [float(v) for v in np.frombuffer(raw, "<f8", n_times, offset)]
    offset += 8 * n_times
    body = np.frombuffer(raw, "<f8", n_times * cells, offset).reshape((n_times,) + (grid_n,) * dim)
    domain = DomainMask(dim, center, half_edge, grid_n, inside)
    dt = times[1] - times[0] if n_times > 1 else 0.0
    return Trajectory(domain, times, [np.array(f) for f in body], dt, epsilon)


def ess_osc(traj: Trajectory, cyl: Cylinder) -> tuple[float, float, float]:
    """(mu_plus, mu_minus, omega) over inside cells of ``cyl``.

    Raises:
        PreconditionError: the cylinder misses the trajectory or E.
    """
    if cyl.t_end < traj.times[0] - 1e-12 or cyl.t_start >= traj.times[-1]:
        raise PreconditionError("cylinder does not intersect the trajectory time range",
                                details={"t_start": cyl.t_start, "t_end": cyl.t_end})
    region = traj.domain.cube_mask(cyl.cube) & traj.domain.inside
    if not region.any():
        raise PreconditionError("cylinder contains no cell of E", details={"cube": str(cyl.cube)})
    t_end = min(cyl.t_end, traj.times[-1])
    values = np.concatenate([f[region] for f in traj.window_fields(cyl.t_start, t_end)])
    mu_plus, mu_minus = float(values.max()), float(values.min())
    return mu_plus, mu_minus, mu_plus - mu_minus
