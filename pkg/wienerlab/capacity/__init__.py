# -*- coding: utf-8 -*-
"""Condenser p-capacities and capacity-ratio profiles."""

from wienerlab.capacity.condenser import (
    CapacityResult,
    CapacitySettings,
    Condenser,
    ball_condenser,
    cube_condenser,
    p_capacity,
)
from wienerlab.capacity.profile import (
    CapacityProfile,
    capacity_profile,
    delta_ratio,
    delta_terms,
    dyadic_scales,
    thickness_profile,
)
from wienerlab.capacity.radial import radial_capacity, sphere_area
from wienerlab.capacity.stencil import GridStencil

__all__ = [
    "CapacityProfile",
    "CapacityResult",
    "CapacitySettings",
    "Condenser",
    "GridStencil",
    "ball_condenser",
    "capacity_profile",
    "cube_condenser",
    "delta_ratio",
    "delta_terms",
    "dyadic_scales",
    "p_capacity",
    "radial_capacity",
    "sphere_area",
    "thickness_profile",
]
