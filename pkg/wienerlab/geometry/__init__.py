# -*- coding: utf-8 -*-
"""Spatial domains, boundary data, cubes and cylinders."""

from wienerlab.geometry.corkscrew import CorkscrewReport, corkscrew_check
from wienerlab.geometry.cube import Cube, Cylinder, intrinsic_cylinder, working_cylinder
from wienerlab.geometry.datum import (
    BoundaryDatum,
    bump_datum,
    constant_datum,
    datum_from_config,
    holder_datum,
    ramp_datum,
    sampled_holder_constant,
    zero_datum,
)
from wienerlab.geometry.descriptors import (
    BallComplement,
    Corkscrew,
    Cusp,
    FullCube,
    GeometryDescriptor,
    HalfSpace,
    Spike,
    Union,
    descriptor_from_config,
)
from wienerlab.geometry.domain import DomainMask, build_domain, domain_from_config, is_boundary_point

__all__ = [
    "BallComplement",
    "BoundaryDatum",
    "Corkscrew",
    "CorkscrewReport",
    "Cube",
    "Cusp",
    "Cylinder",
    "DomainMask",
    "FullCube",
    "GeometryDescriptor",
    "HalfSpace",
    "Spike",
    "Union",
    "build_domain",
    "bump_datum",
    "constant_datum",
    "corkscrew_check",
    "datum_from_config",
    "descriptor_from_config",
    "domain_from_config",
    "holder_datum",
    "intrinsic_cylinder",
    "is_boundary_point",
    "ramp_datum",
    "sampled_holder_constant",
    "working_cylinder",
    "zero_datum",
]
