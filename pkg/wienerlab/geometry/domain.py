# -*- coding: utf-8 -*-
# License: GNU General Public License v3

"""
Domain Masks

A ``DomainMask`` discretizes E inside a bounding cube with ``grid_n`` cells
per axis. A cell belongs to E when its centre does. Arrays use ``ij``
indexing: axis k of the array is coordinate x_k.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import ndimage

from wienerlab.exceptions import GeometryError
from wienerlab.geometry.cube import Cube
from wienerlab.geometry.datum import BoundaryDatum, datum_from_config, zero_datum
from wienerlab.geometry.descriptors import GeometryDescriptor, descriptor_from_config
from wienerlab.logger import log_action, log_debug
from wienerlab.utils.config import ConfigDocument
from wienerlab.utils.validators import Validator, validate_dimension, validate_or_raise

MIN_GRID_N = 8


def cell_centers(center, half_edge: float, grid_n: int) -> list[np.ndarray]:
    """1-D coordinate arrays of cell centres, one per axis"""
    h = 2.0 * half_edge / grid_n
    return [c - half_edge + (np.arange(grid_n) + 0.5) * h for c in center]


def grid_points(axes: list[np.ndarray]) -> np.ndarray:
    """All cell centres as an ``(M, N)`` array in row-major order"""
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


@dataclass
class DomainMask:
    """Discretized E inside ``K_half_edge(center)``"""
    dim: int
    center: tuple[float, ...]
    half_edge: float
    grid_n: int
    inside: np.ndarray
    datum: BoundaryDatum = field(default_factory=zero_datum)
    descriptor: GeometryDescriptor | None = None

    def __post_init__(self):
        expected = (self.grid_n,) * self.dim
        if self.inside.shape != expected:
            raise GeometryError(f"inside field has shape {self.inside.shape}, expected {expected}")

    @property
    def h(self) -> float:
        return 2.0 * self.half_edge / self.grid_n

    @property
    def shape(self) -> tuple[int, ...]:
        return self.inside.shape

    @property
    def bounding_cube(self) -> Cube:
        return Cube(self.center, self.half_edge)

    @property
    def axes(self) -> list[np.ndarray]:
        return cell_centers(self.center, self.half_edge, self.grid_n)

    def points(self) -> np.ndarray:
        return grid_points(self.axes)

    @property
    def has_complement(self) -> bool:
        return not bool(self.inside.all())

    @property
    def inside_fraction(self) -> float:
        return float(self.inside.mean())

    def boundary_cells(self) -> np.ndarray:
        """Inside cells with a face-neighbour outside E"""
        outside = ~self.inside
        grown = ndimage.binary_dilation(outside, structure=ndimage.generate_binary_structure(self.dim, 1))
        return self.inside & grown

    def surface_fraction(self) -> float:
        """Fraction of cells whose closed cell meets both phases"""
        full = ndimage.generate_binary_structure(self.dim, self.dim)
        mixed = ndimage.binary_dilation(self.inside, structure=full) & ndimage.binary_dilation(~self.inside,
                                                                                                structure=full)
        return float(mixed.mean())

    def cube_mask(self, cube: Cube) -> np.ndarray:
        """Cells whose centres lie in the closed cube"""
        masks = [np.abs(ax - c) <= cube.half_edge * (1 + 1e-12) for ax, c in zip(self.axes, cube.center)]
        out = masks[0]
        for m in masks[1:]:
            out = np.multiply.outer(out, m)
        return out.reshape(self.shape)

    def cube_slices(self, cube: Cube) -> tuple[slice, ...]:
        """Index box of the cells selected by ``cube_mask``"""
        slices = []
        for ax, c in zip(self.axes, cube.center):
            idx = np.nonzero(np.abs(ax - c) <= cube.half_edge * (1 + 1e-12))[0]
            if idx.size == 0:
                raise GeometryError(f"cube {cube} contains no cell centre")
            slices.append(slice(int(idx[0]), int(idx[-1]) + 1))
        return tuple(slices)

    def index_of(self, point) -> tuple[int, ...]:
        """Index of the cell containing ``point`` (clipped to the grid)"""
        idx = []
        for c, x in zip(self.center, point):
            i = int(np.floor((x - (c - self.half_edge)) / self.h))
            idx.append(min(max(i, 0), self.grid_n - 1))
        return tuple(idx)

    def outer_layer(self) -> np.ndarray:
        """Cells on the faces of the bounding cube"""
        layer = np.zeros(self.shape, dtype=bool)
        for axis in range(self.dim):
            index = [slice(None)] * self.dim
            index[axis] = 0
            layer[tuple(index)] = True
            index[axis] = -1
            layer[tuple(index)] = True
        return layer

    def datum_field(self, t: float) -> np.ndarray:
        return self.datum(self.points(), t).reshape(self.shape)

    def with_datum(self, datum: BoundaryDatum) -> DomainMask:
        return DomainMask(self.dim, self.center, self.half_edge, self.grid_n, self.inside, datum, self.descriptor)

    def at_resolution(self, grid_n: int) -> DomainMask:
        """Same descriptor and datum on ``grid_n`` cells per axis"""
        if self.descriptor is None:
            raise GeometryError("refinement needs the domain descriptor")
        return build_domain(self.descriptor, grid_n, self.center, self.half_edge, self.datum)

    def describe(self) -> dict:
        return {
            "dim": self.dim,
            "center": list(self.center),
            "half_edge": self.half_edge,
            "grid_n": self.grid_n,
            "h": self.h,
            "inside_fraction": self.inside_fraction,
            "descriptor": self.descriptor.describe() if self.descriptor else None,
            "datum": self.datum.describe(),
        }

    def to_pgm(self, path: str | Path) -> Path:
        """Dump E as a binary PGM image (255 = inside). 3-D masks dump the middle slice."""
        image = self.inside
        while image.ndim > 2:
            image = image[image.shape[0] // 2]
        if image.ndim == 1:
            image = image[np.newaxis, :]
        # rows run along x_2 (top = largest), columns along x_1
        pixels = np.where(image.T[::-1], 255, 0).astype(np.uint8)
        path = Path(path)
        header = f"P5\n{pixels.shape[1]} {pixels.shape[0]}\n255\n".encode("ascii")
        path.write_bytes(header + pixels.tobytes())
        return path


@log_action("Build domain")
def build_domain(
    descriptor: GeometryDescriptor,
    grid_n: int,
    center=None,
    half_edge: float = 1.0,
    datum: BoundaryDatum | None = None
) -> DomainMask:
    """Evaluate ``descriptor`` at cell centres.

    Raises:
        ValidationError: grid_n < 8, unsupported dimension.
        GeometryError: E empty, or the complement empty when the descriptor
            promises one.
    """
    dim = descriptor.dim
    validate_or_raise(
        validate_dimension(dim),
        Validator().field("grid_n", grid_n).required().at_least(MIN_GRID_N).validate(),
        Validator().field("half_edge", half_edge).positive().validate(),
    )
    center = tuple(float(c) for c in (center if center is not None else (0.0,) * dim))
    if len(center) != dim:
        raise GeometryError(f"bounding cube centre has {len(center)} coordinates, expected {dim}")

    axes = cell_centers(center, half_edge, grid_n)
    inside = descriptor.contains(grid_points(axes)).reshape((grid_n,) * dim)

    if not inside.any():
        raise GeometryError(f"{descriptor.kind} descriptor leaves E empty on this grid",
                            details=descriptor.describe())
    if descriptor.has_complement and inside.all():
        raise GeometryError(f"{descriptor.kind} descriptor has no complement cells on this grid; "
                            "enlarge the bounding cube or refine", details=descriptor.describe())

    mask = DomainMask(dim, center, float(half_edge), int(grid_n), inside, datum or zero_datum(), descriptor)
    log_debug("Domain built", {"kind": descriptor.kind, "grid_n": grid_n,
                               "inside_fraction": round(mask.inside_fraction, 6)})
    return mask


def domain_from_config(doc: ConfigDocument, section: str = "domain", datum_section: str = "datum") -> DomainMask:
    """``[domain]`` + ``[datum]`` sections to a mask"""
    descriptor = descriptor_from_config(doc, section)
    dim = descriptor.dim
    center = doc.get_floats(section, "center", (0.0,) * dim)
    datum = datum_from_config(doc, datum_section, dim)
    return build_domain(descriptor, doc.get_int(section, "grid_n"), center,
                        doc.get_float(section, "half_edge", 1.0), datum)


def is_boundary_point(domain: DomainMask, x) -> bool:
    """Both phases occur among the cells within one cell of ``x``"""
    idx = domain.index_of(x)
    window = tuple(slice(max(i - 1, 0), i + 2) for i in idx)
    block = domain.inside[window]
    return bool(block.any() and not block.all())
