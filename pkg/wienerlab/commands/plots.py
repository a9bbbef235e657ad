# -*- coding: utf-8 -*-
# License: GNU General Public License v3

"""
SVG Line Charts

Optional self-contained charts next to the CSV tables (``--svg``). The Agg
backend is forced so no display is needed; a fixed hash salt and no date
metadata keep the files reproducible.
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import Mapping, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

plt.rcParams["svg.hashsalt"] = "wienerlab"


def line_chart(
    path: str | Path,
    x: Sequence[float],
    series: Mapping[str, Sequence[float]],
    xlabel: str,
    ylabel: str,
    title: str = "",
    logx: bool = False,
    logy: bool = False
) -> Path:
    """One polyline per series; non-finite points are dropped"""
    path = Path(path)
    fig, ax = plt.subplots(figsize=(6, 4))
    try:
        for label, values in series.items():
            pairs = [(a, b) for a, b in zip(x, values)
                     if math.isfinite(a) and math.isfinite(b) and (not logy or b > 0) and (not logx or a > 0)]
            if not pairs:
                continue
            xs, ys = zip(*pairs)
            ax.plot(xs, ys, marker="o", label=label)
        if logx:
            ax.set_xscale("log")
        if logy:
            ax.set_yscale("log")
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        if title:
            ax.set_title(title)
        if len(series) > 1:
            ax.legend()
        ax.grid(True, alpha=0.3)
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
    finally:
        plt.close(fig)
    return path
