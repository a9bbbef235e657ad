# -*- coding: utf-8 -*-
# License: GNU General Public License v3

"""
Truncation and Zero Extension

Upper mode: u_k = (u - k)_+ on E, 0 on the complement, valid for
k >= sup_Sigma g. Lower mode: u_h = (h - u)_+, valid for h <= inf_Sigma g.
In both modes v = mu - u_k with mu = sup of the truncation over the working
cylinder Q, so 0 <= v <= mu on Q.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from wienerlab.exceptions import PreconditionError
from wienerlab.geometry.cube import Cylinder
from wienerlab.pde.trajectory import Trajectory

MODES = ("upper", "lower")


@dataclass
class TruncationResult:
    mode: str
    level: float
    mu: float
    times: list[float]
    truncated: list[np.ndarray] = field(repr=False)
    v: list[np.ndarray] = field(repr=False)
    region: np.ndarray = field(repr=False)

    def v_at(self, t: float) -> np.ndarray:
        """v at the stored time nearest to ``t``"""
        k = int(np.argmin(np.abs(np.asarray(self.times) - t)))
        return self.v[k]


def lateral_extremes(traj: Trajectory, cylinder: Cylinder | None = None) -> tuple[float, float]:
    """(inf, sup) of the Dirichlet data on complement cells of the window"""
    domain = traj.domain
    region = ~domain.inside
    if cylinder is not None:
        region = region & domain.cube_mask(cylinder.cube)
        fields = traj.window_fields(cylinder.t_start, min(cylinder.t_end, traj.t_final))
    else:
        fields = traj.fields
    if not region.any():
        raise PreconditionError("no complement cells in the working region; Sigma is empty")
    values = np.concatenate([f[region] for f in fields])
    return float(values.min()), float(values.max())


def truncate_and_extend(
    traj: Trajectory,
    k: float,
    mode: str = "upper",
    cylinder: Cylinder | None = None
) -> TruncationResult:
    """Truncated trajectory and the super-solution v over ``cylinder`` (whole run if None).

    Raises:
        PreconditionError: the level is on the wrong side of the lateral data.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    low, high = lateral_extremes(traj, cylinder)
    if mode == "upper" and k < high - 1e-12:
        raise PreconditionError(f"level k={k:.6g} is below sup_Sigma g = {high:.6g}; "
                                "the extension would not be a sub-solution", details={"k": k, "sup_g": high})
    if mode == "lower" and k > low + 1e-12:
        raise PreconditionError(f"level h={k:.6g} exceeds inf_Sigma g = {low:.6g}",
                                details={"h": k, "inf_g": low})

    domain = traj.domain
    if cylinder is not None:
        idx = traj.indices_in(cylinder.t_start, cylinder.t_end)
        region = domain.cube_mask(cylinder.cube)
    else:
        idx = list(range(len(traj)))
        region = np.ones(domain.shape, dtype=bool)
    if not idx:
        raise PreconditionError("no stored time in the working cylinder")

    truncated = []
    for j in idx:
        u = traj.fields[j]
        part = np.maximum(u - k, 0.0) if mode == "upper" else np.maximum(k - u, 0.0)
        truncated.append(np.where(domain.inside, part, 0.0))
    mu = max(float(t[region].max()) for t in truncated)
    v = [mu - t for t in truncated]
    return TruncationResult(mode, float(k), mu, [traj.times[j] for j in idx], truncated, v, region)
