# -*- coding: utf-8 -*-
# License: GNU General Public License v3

"""
Pass Criteria

Every threshold used by the checks lives here so it can be tightened in one
place, or per run from a ``[criteria]`` config section.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields

from wienerlab.exceptions import ConfigError
from wienerlab.utils.config import ConfigDocument


@dataclass(frozen=True)
class Criteria:
    correlation: float = 0.9
    stability_factor: float = 2.0
    backward_tolerance: float = 0.10
    dt_tolerance: float = 0.05
    window_spread: float = 0.5
    extinction_threshold: float = 1e-6
    extinction_tolerance: float = 0.25
    persistence_floor: float = 0.01
    c_sweep: tuple[float, ...] = (0.05, 0.1, 0.2)
    min_scales: int = 3
    fat_floor: float = 1e-3
    fat_collapse: float = 0.5
    slope_fraction: float = 0.1
    comparison_tol: float = 1e-8
    nominal_working_factor: float = 32.0

    def to_dict(self) -> dict:
        out = asdict(self)
        out["c_sweep"] = list(self.c_sweep)
        return out

    @classmethod
    def from_config(cls, doc: ConfigDocument, section: str = "criteria") -> Criteria:
        if not doc.has_section(section):
            return cls()
        known = {f.name: f for f in fields(cls)}
        values: dict = {}
        for key, entry in doc.section(section).items():
            if key not in known:
                raise ConfigError(f"unknown criterion {key!r}", field=f"{section}.{key}", line=entry.line)
            if key == "c_sweep":
                values[key] = doc.get_floats(section, key)
            elif key == "min_scales":
                values[key] = doc.get_int(section, key)
            else:
                values[key] = doc.get_float(section, key)
        return cls(**values)


DEFAULT_CRITERIA = Criteria()
