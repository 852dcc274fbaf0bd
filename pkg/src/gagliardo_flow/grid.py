"""Uniform box grids in 1D/2D and the precomputed singular pair-weight table.

Cell centers sit at midpoints of a uniform axis-aligned partition; the pair
weight between cells i and j is

    w_ij = mu^2 |x_i - x_j|^(-(n + s p)),   w_ii = 0,

with mu the (uniform) cell measure. The table is built once per run and
shared read-only afterwards.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels as kernels
from .errors import InvalidExponent, InvalidGeometry


@dataclass(frozen=True)
class Grid:
    n: int
    cells_per_axis: tuple
    centers: np.ndarray          # (n_cells, n)
    cell_measure: float          # mu = spacing^n
    box: tuple                   # (lower corner, upper corner), each length n
    collar_width: float
    spacing: float
    interior_mask: np.ndarray = field(repr=False)

    @property
    def n_cells(self) -> int:
        return self.centers.shape[0]

    @property
    def collar_mask(self) -> np.ndarray:
        return ~self.interior_mask

    def boundary_distance(self) -> np.ndarray:
        lo, hi = self.box
        d = np.minimum(self.centers - np.asarray(lo), np.asarray(hi) - self.centers)
        return d.min(axis=1)


def build_grid(box, cells_per_axis, collar_width: float = 0.0) -> Grid:
    """Partition an axis-aligned box into uniform cells.

    box: (lo, hi) scalars in 1D, or (lo_vec, hi_vec) in 2D.
    cells_per_axis: int or one int per axis (>= 2 each).
    collar_width: cells closer than this to the boundary form the collar.
    """
    lo, hi = box
    lo = np.atleast_1d(np.asarray(lo, dtype=float))
    hi = np.atleast_1d(np.asarray(hi, dtype=float))
    n = lo.size
    if n not in (1, 2):
        raise InvalidGeometry(f"spatial dimension must be 1 or 2, got {n}")
    if lo.shape != (n,) or hi.shape != (n,):
        raise InvalidGeometry(
            f"box corners must have {n} coordinates, got {lo.shape} and {hi.shape}"
        )

    if np.isscalar(cells_per_axis):
        cells_per_axis = (int(cells_per_axis),) * n
    else:
        cells_per_axis = tuple(int(c) for c in cells_per_axis)
    if len(cells_per_axis) != n:
        raise InvalidGeometry(
            f"cells_per_axis has {len(cells_per_axis)} entries for a {n}D box"
        )
    if np.any(hi <= lo):
        raise InvalidGeometry("box upper corner must exceed lower corner")
    if any(c < 2 for c in cells_per_axis):
        raise InvalidGeometry("need at least 2 cells per axis")
    if collar_width < 0:
        raise InvalidGeometry("collar_width must be >= 0")

    spacings = (hi - lo) / np.asarray(cells_per_axis, dtype=float)
    if not np.allclose(spacings, spacings[0], rtol=1e-12, atol=0.0):
        raise InvalidGeometry(
            f"cell spacing must be uniform across axes, got {spacings}"
        )
    spacing = float(spacings[0])

    axes = [
        lo[a] + spacing * (np.arange(cells_per_axis[a]) + 0.5)
        for a in range(n)
    ]
    mesh = np.meshgrid(*axes, indexing="ij")
    centers = np.stack([m.reshape(-1) for m in mesh], axis=1)

    dist = np.minimum(centers - lo, hi - centers).min(axis=1)
    interior = dist >= collar_width - 1e-12
    if not np.any(interior):
        raise InvalidGeometry("collar swallows every cell: empty interior")

    return Grid(
        n=n,
        cells_per_axis=cells_per_axis,
        centers=np.ascontiguousarray(centers),
        cell_measure=float(spacing**n),
        box=(tuple(lo.tolist()), tuple(hi.tolist())),
        collar_width=float(collar_width),
        spacing=spacing,
        interior_mask=interior,
    )


@dataclass(frozen=True)
class KernelTable:
    s: float
    p: float
    weights: np.ndarray = field(repr=False)
    grid: Grid

    @property
    def n_cells(self) -> int:
        return self.weights.shape[0]


def build_kernel(grid: Grid, s: float, p: float) -> KernelTable:
    """Precompute the pair-weight table for exponents s in (0,1), p in (1,inf)."""
    if not 0.0 < s < 1.0:
        raise InvalidExponent(f"s must lie in (0,1), got {s}")
    if not p > 1.0 or not np.isfinite(p):
        raise InvalidExponent(f"p must lie in (1,inf), got {p}")
    expo = grid.n + s * p
    w = kernels.weights_table(grid.centers, grid.cell_measure, float(expo))
    # uniform midpoint grids keep centers separated by at least one spacing
    off = w[~np.eye(grid.n_cells, dtype=bool)]
    if not np.all(np.isfinite(off)):
        raise InvalidGeometry("coincident cell centers produce infinite weights")
    return KernelTable(s=float(s), p=float(p), weights=w, grid=grid)
