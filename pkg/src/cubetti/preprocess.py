"""Unstacking: separate cubes that touch only along an edge or at a vertex.

The body is scaled by 3 in every direction, every fine cube with a face on the
body's boundary is removed, and the result is padded so that it lies in the
interior of its bounding box.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .codes import neighborhood_codes
from .grid import VoxelGrid

MARGIN = 1


@dataclass(frozen=True)
class PreprocessReport:
    input_cubes: int
    subdivided_cubes: int
    eroded_cubes: int
    corner_cubes_cleared: int
    output_cubes: int
    output_dims: tuple[int, int, int]
    margin: int


def subdivide3(grid: VoxelGrid) -> VoxelGrid:
    """Scale by 3: each cube becomes a 3x3x3 block of cubes."""
    occ = grid.occupancy
    for axis in range(3):
        occ = np.repeat(occ, 3, axis=axis)
    return VoxelGrid(occ)


def erode_boundary_faces(grid: VoxelGrid) -> VoxelGrid:
    """Drop, in one simultaneous pass, every occupied cube whose neighbor across
    some face is vacant or outside the box."""
    occ = grid.occupancy
    p = np.pad(occ, 1)
    keep = occ.copy()
    nx, ny, nz = occ.shape
    for axis in range(3):
        for shift in (0, 2):
            sl = [slice(1, 1 + nx), slice(1, 1 + ny), slice(1, 1 + nz)]
            n = (nx, ny, nz)[axis]
            sl[axis] = slice(shift, shift + n)
            keep &= p[tuple(sl)]
    return VoxelGrid(keep)


# Eight blocks around a coarse vertex with exactly two vacant blocks that share an
# edge. Erosion keeps the corner subcubes of the two blocks diagonal to that pair,
# and those two fine cubes meet along a single edge. Exhaustive check over all
# 256 block patterns shows these 12 are the only ones leaving such a contact.
_EDGE_HOLE_PATTERNS = np.zeros(256, dtype=bool)
for _p in range(256):
    _vacant = [b for b in range(8) if not _p >> b & 1]
    if len(_vacant) == 2 and bin(_vacant[0] ^ _vacant[1]).count("1") == 2:
        _EDGE_HOLE_PATTERNS[_p] = True
del _p, _vacant


def clear_corner_contacts(eroded: VoxelGrid, coarse: VoxelGrid) -> tuple[VoxelGrid, int]:
    """Remove the fine corner cubes at coarse vertices with an edge-hole pattern.

    ``eroded`` is ``erode_boundary_faces(subdivide3(coarse))``. Returns the
    repaired grid and the number of cubes removed.
    """
    fine = eroded.occupancy.copy()
    patterns = neighborhood_codes(coarse.occupancy)
    hits = np.argwhere(_EDGE_HOLE_PATTERNS[patterns])
    removed = 0
    shape = np.array(fine.shape)
    for s in np.ndindex(2, 2, 2):
        idx = 3 * hits - 1 + np.array(s)
        idx = idx[np.all((idx >= 0) & (idx < shape), axis=1)]
        if len(idx):
            t = tuple(idx.T)
            removed += int(np.count_nonzero(fine[t]))
            fine[t] = False
    return VoxelGrid(fine), removed


def pad(grid: VoxelGrid, margin: int) -> VoxelGrid:
    if margin <= 0:
        raise ValueError(f"margin must be positive, got {margin}")
    return VoxelGrid(np.pad(grid.occupancy, margin))


def preprocess(grid: VoxelGrid) -> tuple[VoxelGrid, PreprocessReport]:
    fine = subdivide3(grid)
    eroded = erode_boundary_faces(fine)
    repaired, cleared = clear_corner_contacts(eroded, grid)
    out = pad(repaired, MARGIN)
    report = PreprocessReport(
        input_cubes=grid.count(),
        subdivided_cubes=fine.count(),
        eroded_cubes=fine.count() - eroded.count(),
        corner_cubes_cleared=cleared,
        output_cubes=out.count(),
        output_dims=out.dims,
        margin=MARGIN,
    )
    return out, report
