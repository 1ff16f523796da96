"""Binary voxel bodies: storage, the cubetti-voxels text format, shape generators."""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import Iterable, TextIO

import numpy as np

FORMAT_MAGIC = "cubetti-voxels 1"

SHAPE_KINDS = ("solid-box", "shell", "ring", "two-components", "random")


class GridParseError(ValueError):
    """Malformed cubetti-voxels input; carries the 1-based line number."""

    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class VoxelGrid:
    """Occupancy of the unit cubes of a box ``[0,Nx] x [0,Ny] x [0,Nz]``.

    Cube ``(i, j, k)`` is ``[i, i+1] x [j, j+1] x [k, k+1]``. Lattice vertices are
    addressed separately, as integer triples in ``[0,Nx] x [0,Ny] x [0,Nz]``.
    The occupancy array is read-only; every transform returns a new grid.
    """

    __slots__ = ("_occ",)

    def __init__(self, occupancy):
        occ = np.array(occupancy, dtype=bool, copy=True)
        if occ.ndim != 3:
            raise ValueError(f"occupancy must be 3-dimensional, got shape {occ.shape}")
        if min(occ.shape) <= 0:
            raise ValueError(f"dims must be positive, got {occ.shape}")
        occ.flags.writeable = False
        self._occ = occ

    @classmethod
    def empty(cls, nx: int, ny: int, nz: int) -> "VoxelGrid":
        return cls(np.zeros((nx, ny, nz), dtype=bool))

    @classmethod
    def from_cubes(cls, dims: tuple[int, int, int], cubes: Iterable[tuple[int, int, int]]) -> "VoxelGrid":
        occ = np.zeros(dims, dtype=bool)
        for c in cubes:
            occ[tuple(c)] = True
        return cls(occ)

    @property
    def dims(self) -> tuple[int, int, int]:
        return tuple(int(s) for s in self._occ.shape)  # type: ignore[return-value]

    @property
    def occupancy(self) -> np.ndarray:
        return self._occ

    def __getitem__(self, ijk) -> bool:
        i, j, k = ijk
        nx, ny, nz = self._occ.shape
        if 0 <= i < nx and 0 <= j < ny and 0 <= k < nz:
            return bool(self._occ[i, j, k])
        return False

    def count(self) -> int:
        return int(np.count_nonzero(self._occ))

    def cubes(self) -> list[tuple[int, int, int]]:
        return [tuple(int(v) for v in c) for c in np.argwhere(self._occ)]

    def __eq__(self, other) -> bool:
        if not isinstance(other, VoxelGrid):
            return NotImplemented
        return self._occ.shape == other._occ.shape and bool(np.array_equal(self._occ, other._occ))

    def __hash__(self) -> int:
        return hash((self._occ.shape, np.packbits(self._occ).tobytes()))

    def __repr__(self) -> str:
        return f"VoxelGrid(dims={self.dims}, occupied={self.count()})"


@dataclass(frozen=True)
class ShapeSpec:
    """Parameters for :func:`generate`.

    ``size`` is interpreted per kind: ``(n, m, k)`` for solid-box, ``(n,)`` outer
    side for shell and ring, ``(side, gap)`` for two-components, ``(nx, ny, nz)``
    for random.
    """

    kind: str
    size: tuple[int, ...] = field(default=())
    density: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if self.kind not in SHAPE_KINDS:
            raise ValueError(f"unknown shape kind {self.kind!r}; expected one of {SHAPE_KINDS}")
        if any(int(s) <= 0 for s in self.size):
            raise ValueError(f"sizes must be positive, got {self.size}")
        if not 0.0 <= self.density <= 1.0:
            raise ValueError(f"density must lie in [0, 1], got {self.density}")


def load_grid(source: TextIO | str) -> VoxelGrid:
    """Parse cubetti-voxels text (a stream or a string)."""
    if isinstance(source, str):
        source = io.StringIO(source)
    dims = None
    cubes = []
    seen_magic = False
    for lineno, raw in enumerate(source, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if not seen_magic:
            if line != FORMAT_MAGIC:
                raise GridParseError(lineno, f"expected header {FORMAT_MAGIC!r}, got {line!r}")
            seen_magic = True
            continue
        tokens = line.split()
        if dims is None:
            if len(tokens) != 4 or tokens[0] != "dim":
                raise GridParseError(lineno, f"expected 'dim <Nx> <Ny> <Nz>', got {line!r}")
            dims = tuple(_parse_int(t, lineno) for t in tokens[1:])
            if min(dims) <= 0:
                raise GridParseError(lineno, f"dims must be positive, got {dims}")
            continue
        if len(tokens) != 3:
            raise GridParseError(lineno, f"expected three indices, got {line!r}")
        ijk = tuple(_parse_int(t, lineno) for t in tokens)
        if not all(0 <= v < n for v, n in zip(ijk, dims)):
            raise GridParseError(lineno, f"index out of range: {ijk} not inside dims {dims}")
        cubes.append(ijk)
    if not seen_magic:
        raise GridParseError(1, "empty input, missing header")
    if dims is None:
        raise GridParseError(lineno, "missing 'dim' line")
    return VoxelGrid.from_cubes(dims, cubes)


def _parse_int(token: str, lineno: int) -> int:
    try:
        return int(token, 10)
    except ValueError:
        raise GridParseError(lineno, f"non-integer token {token!r}") from None


def save_grid(grid: VoxelGrid) -> str:
    """Serialize to cubetti-voxels text, cubes in C (i, j, k) order."""
    nx, ny, nz = grid.dims
    lines = [FORMAT_MAGIC, f"dim {nx} {ny} {nz}"]
    lines.extend(f"{i} {j} {k}" for i, j, k in np.argwhere(grid.occupancy))
    return "\n".join(lines) + "\n"


def generate(spec: ShapeSpec) -> VoxelGrid:
    """Build a body of known topology (or a seeded random one).

    The random kind draws ``numpy.random.Generator(PCG64(seed)).random((nx, ny, nz))``
    (C order) and occupies a cube iff its draw is ``< density``.
    """
    kind, size = spec.kind, tuple(int(s) for s in spec.size)
    if kind == "solid-box":
        n, m, k = size or (1, 1, 1)
        return VoxelGrid(np.ones((n, m, k), dtype=bool))
    if kind == "shell":
        (n,) = size or (3,)
        if n < 3:
            raise ValueError("shell needs an outer side of at least 3")
        occ = np.ones((n, n, n), dtype=bool)
        occ[1:-1, 1:-1, 1:-1] = False
        return VoxelGrid(occ)
    if kind == "ring":
        (n,) = size or (3,)
        if n < 3:
            raise ValueError("ring needs an outer side of at least 3")
        occ = np.ones((n, n, 1), dtype=bool)
        occ[1:-1, 1:-1, 0] = False
        return VoxelGrid(occ)
    if kind == "two-components":
        side, gap = size or (1, 1)
        n = 2 * side + gap
        occ = np.zeros((n, n, n), dtype=bool)
        occ[:side, :side, :side] = True
        occ[side + gap:, side + gap:, side + gap:] = True
        return VoxelGrid(occ)
    # random
    dims = size or (8, 8, 8)
    if len(dims) != 3:
        raise ValueError(f"random needs three dims, got {dims}")
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    return VoxelGrid(rng.random(dims) < spec.density)


def complement(grid: VoxelGrid) -> VoxelGrid:
    """Cube-wise complement within the bounding box."""
    return VoxelGrid(~grid.occupancy)


def reflect(grid: VoxelGrid) -> VoxelGrid:
    """Point reflection through the box center: cube (i,j,k) -> (Nx-1-i, Ny-1-j, Nz-1-k).

    Sweeping the reflected body upward in x+y+z visits the original body in
    decreasing x+y+z, i.e. it is the sweep of the negated height function.
    """
    return VoxelGrid(grid.occupancy[::-1, ::-1, ::-1])
