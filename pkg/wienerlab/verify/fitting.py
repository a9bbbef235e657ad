# -*- coding: utf-8 -*-
# License: GNU General Public License v3

"""
Fits and Refinement Stability

Least-squares lines via ``scipy.stats.linregress`` and a wrapper that runs
a fitted quantity at two resolutions and reports its drift.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np
from scipy import stats

from wienerlab.utils.background import run_ordered


@dataclass(frozen=True)
class LinearFit:
    slope: float
    intercept: float
    correlation: float
    stderr: float
    count: int

    def to_dict(self) -> dict:
        return asdict(self)


def fit_line(x, y) -> LinearFit | None:
    """Least-squares line through finite pairs; None with fewer than two
    distinct abscissae
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    keep = np.isfinite(x) & np.isfinite(y)
    x, y = x[keep], y[keep]
    if len(x) < 2 or np.ptp(x) == 0:
        return None
    if len(x) == 2 or np.ptp(y) == 0:
        slope = float((y[-1] - y[0]) / (x[-1] - x[0])) if np.ptp(y) else 0.0
        return LinearFit(slope, float(y[0] - slope * x[0]), math.copysign(1.0, slope) if slope else 0.0, 0.0, len(x))
    res = stats.linregress(x, y)
    return LinearFit(float(res.slope), float(res.intercept), float(res.rvalue), float(res.stderr), len(x))


@dataclass
class RefinementResult:
    grid_sizes: tuple[int, int]
    values: tuple[float, float]
    drift: float
    stable: bool

    def to_dict(self) -> dict:
        return {"grid_sizes": list(self.grid_sizes), "values": list(self.values), "drift": self.drift,
                "stable": self.stable}


def drift_factor(a: float, b: float) -> float:
    """max/min of two positive values (inf when either is not positive)"""
    if not (a > 0 and b > 0) or not (math.isfinite(a) and math.isfinite(b)):
        return math.inf
    return max(a, b) / min(a, b)


def refinement_check(
    run: Callable[[int], float],
    grid_n: int,
    stability_factor: float = 2.0,
    workers: int | None = None
) -> RefinementResult:
    """Evaluate ``run`` at grid_n / 2 and grid_n"""
    sizes = (grid_n // 2, grid_n)
    coarse, fine = run_ordered(run, sizes, workers)
    drift = drift_factor(coarse, fine)
    return RefinementResult(sizes, (float(coarse), float(fine)), drift, drift < stability_factor)
