"""Brute-force ground truth.

Everything here is computed from definitions, independently of the sweep in
:mod:`cubetti.morse`: full cubical homology of a body, face-adjacency component
counts, and the per-code classification of lattice vertices obtained from the
relative homology of local sublevel sets in the Freudenthal triangulation.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .codes import (
    PERMUTATIONS,
    VertexClass,
    is_well_composed,
    octant_bit,
    octant_signs,
    permute_code,
)
from .grid import VoxelGrid

DEFAULT_MAX_CELLS = 250_000


class OracleSizeError(ValueError):
    pass


class TableMismatchError(AssertionError):
    def __init__(self, codes: list[int], message: str):
        super().__init__(message)
        self.codes = codes


# ---------------------------------------------------------------------------
# GF(2) rank of sparse columns


def _reduce_columns(columns, skip=frozenset()):
    """Left-to-right column reduction with pivot = highest row index.

    ``columns`` is a sequence of Python ints used as row bitsets. Returns the
    rank and the set of pivot rows. Columns whose index is in ``skip`` are known
    to reduce to zero and are not touched.
    """
    pivots: dict[int, int] = {}
    for j, col in enumerate(columns):
        if j in skip:
            continue
        while col:
            low = col.bit_length() - 1
            other = pivots.get(low)
            if other is None:
                pivots[low] = col
                break
            col ^= other
    return len(pivots), frozenset(pivots)


# ---------------------------------------------------------------------------
# Cubical chain complex of a body


@dataclass
class CubicalChainComplex:
    """Cells of a cubical body in doubled coordinates (a cell's coordinate is odd
    along each axis it extends in), plus boundary columns over GF(2).

    ``cells[k]`` is an ``(n_k, 3)`` array, lexicographically sorted;
    ``boundary[k]`` (k = 1, 2, 3) lists, for each k-cell, the indices of its
    (k-1)-faces.
    """

    cells: list[np.ndarray]
    boundary: dict[int, list[np.ndarray]]

    @classmethod
    def from_grid(cls, grid: VoxelGrid) -> "CubicalChainComplex":
        occ = grid.occupancy
        nx, ny, nz = occ.shape
        doubled = np.zeros((2 * nx + 1, 2 * ny + 1, 2 * nz + 1), dtype=bool)
        doubled[1::2, 1::2, 1::2] = occ
        present = np.zeros_like(doubled)
        # a cell belongs to the body iff it is a face of some occupied cube
        p = np.pad(doubled, 1)
        for dx, dy, dz in itertools.product((0, 1, 2), repeat=3):
            present |= p[dx:dx + doubled.shape[0], dy:dy + doubled.shape[1], dz:dz + doubled.shape[2]]
        parity = np.add.outer(np.add.outer(np.arange(doubled.shape[0]) % 2, np.arange(doubled.shape[1]) % 2),
                              np.arange(doubled.shape[2]) % 2)
        index = np.full(doubled.shape, -1, dtype=np.int64)
        cells = []
        for k in range(4):
            coords = np.argwhere(present & (parity == k))
            index[tuple(coords.T)] = np.arange(len(coords))
            cells.append(coords)
        boundary: dict[int, list[np.ndarray]] = {}
        for k in range(1, 4):
            faces = []
            for c in cells[k]:
                f = []
                for a in range(3):
                    if c[a] % 2:
                        for d in (-1, 1):
                            w = c.copy()
                            w[a] += d
                            f.append(int(index[tuple(w)]))
                faces.append(np.array(f, dtype=np.int64))
            boundary[k] = faces
        return cls(cells, boundary)

    def counts(self) -> tuple[int, int, int, int]:
        return tuple(len(c) for c in self.cells)  # type: ignore[return-value]

    def boundary_bitsets(self, k: int) -> list[int]:
        out = []
        for faces in self.boundary[k]:
            col = 0
            for f in faces:
                col ^= 1 << int(f)
            out.append(col)
        return out

    def boundary_dense(self, k: int) -> np.ndarray:
        """``(n_{k-1}, n_k)`` 0/1 matrix; only sensible for small complexes."""
        m = np.zeros((len(self.cells[k - 1]), len(self.cells[k])), dtype=np.uint8)
        for j, faces in enumerate(self.boundary[k]):
            for f in faces:
                m[f, j] ^= 1
        return m

    def ranks(self) -> tuple[int, int, int]:
        """Ranks of the boundary maps of dimensions 1, 2, 3."""
        r3, piv3 = _reduce_columns(self.boundary_bitsets(3))
        # a square that is the pivot of a reduced 3-boundary is itself a boundary
        # chain's leading term, so its own column reduces to zero
        r2, piv2 = _reduce_columns(self.boundary_bitsets(2), skip=piv3)
        r1, _ = _reduce_columns(self.boundary_bitsets(1), skip=piv2)
        return r1, r2, r3


class OracleReport(NamedTuple):
    b0: int
    b1: int
    b2: int
    chi: int
    cell_counts: tuple[int, int, int, int]
    ranks: tuple[int, int, int]


def betti_bruteforce(grid: VoxelGrid, max_cells: int = DEFAULT_MAX_CELLS) -> OracleReport:
    """Mod-2 Betti numbers of the closed union of the occupied cubes, as
    ``dim ker / dim im`` of the full cubical chain complex."""
    est = 8 * grid.count()
    if est > max_cells:
        raise OracleSizeError(f"body has ~{est} cells, above the oracle limit of {max_cells}")
    cx = CubicalChainComplex.from_grid(grid)
    n = cx.counts()
    r1, r2, r3 = cx.ranks()
    b0 = n[0] - r1
    b1 = n[1] - r1 - r2
    b2 = n[2] - r2 - r3
    b3 = n[3] - r3
    if b3 != 0:
        raise AssertionError(f"a body in R^3 cannot carry 3-cycles, got b3={b3}")
    chi = n[0] - n[1] + n[2] - n[3]
    return OracleReport(b0, b1, b2, chi, n, (r1, r2, r3))


# ---------------------------------------------------------------------------
# Union-find


class UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n
        self.count = n

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, x: int, y: int) -> bool:
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return False
        if self.size[rx] < self.size[ry]:
            rx, ry = ry, rx
        self.parent[ry] = rx
        self.size[rx] += self.size[ry]
        self.count -= 1
        return True


def components_union_find(grid: VoxelGrid) -> int:
    """Number of face-connected components of the occupied cubes."""
    occ = grid.occupancy
    ids = np.full(occ.shape, -1, dtype=np.int64)
    cubes = np.argwhere(occ)
    ids[tuple(cubes.T)] = np.arange(len(cubes))
    uf = UnionFind(len(cubes))
    for axis in range(3):
        lo = [slice(None)] * 3
        hi = [slice(None)] * 3
        lo[axis] = slice(0, -1)
        hi[axis] = slice(1, None)
        both = occ[tuple(lo)] & occ[tuple(hi)]
        for a, b in zip(ids[tuple(lo)][both].tolist(), ids[tuple(hi)][both].tolist()):
            uf.union(a, b)
    return uf.count


# ---------------------------------------------------------------------------
# Local classification of a vertex


class LocalPairProfile(NamedTuple):
    r0: int
    r1: int
    r2: int


PROFILE_CLASSES = {
    LocalPairProfile(0, 0, 0): VertexClass.REGULAR,
    LocalPairProfile(1, 0, 0): VertexClass.INDEX0,
    LocalPairProfile(0, 1, 0): VertexClass.INDEX1,
    LocalPairProfile(0, 0, 1): VertexClass.INDEX2,
    LocalPairProfile(0, 2, 0): VertexClass.MONKEY,
}

_ORIGIN = (0, 0, 0)


def freudenthal_simplices(code: int) -> set[frozenset]:
    """All simplices of the Freudenthal triangulation of the occupied octants
    around the origin; vertices are offsets in ``{-1,0,1}^3``."""
    out: set[frozenset] = set()
    for b in range(8):
        if not code >> b & 1:
            continue
        corner = [s - 1 for s in octant_signs(b)]
        for perm in PERMUTATIONS:
            chain = [tuple(corner)]
            c = list(corner)
            for axis in perm:
                c[axis] += 1
                chain.append(tuple(c))
            for k in range(1, 5):
                out.update(frozenset(s) for s in itertools.combinations(chain, k))
    return out


def local_profile(code: int, direction: int = 1) -> LocalPairProfile:
    """Mod-2 ranks of H_k(L, L-) where L (resp. L-) is the full subcomplex on the
    vertices of height <= 0 (resp. <= -1), height = direction * (x + y + z)."""
    simplices = freudenthal_simplices(code)

    def height(w):
        return direction * (w[0] + w[1] + w[2])

    lower = [s for s in simplices if all(height(w) <= 0 for w in s)]
    relative = [s for s in lower if not all(height(w) <= -1 for w in s)]
    by_dim = [sorted((s for s in relative if len(s) == k + 1), key=sorted) for k in range(4)]
    index = [{s: i for i, s in enumerate(cells)} for cells in by_dim]
    rank = [0] * 5
    for k in range(1, 4):
        cols = []
        for s in by_dim[k]:
            col = 0
            for w in s:
                j = index[k - 1].get(s - {w})
                if j is not None:
                    col ^= 1 << j
            cols.append(col)
        rank[k], _ = _reduce_columns(cols)
    betti = [len(by_dim[k]) - rank[k] - rank[k + 1] for k in range(4)]
    if betti[3]:
        raise AssertionError(f"code {code:#04x}: local 3-handle is impossible")
    return LocalPairProfile(*betti[:3])


def classify_code_oracle(code: int, direction: int = 1) -> VertexClass:
    """Class of a vertex with neighborhood ``code`` for the height ``direction*(x+y+z)``.

    Critical codes that are not well-composed cannot occur in an unstacked body
    and are reported as FORBIDDEN, as are profiles outside the five known ones.
    """
    cls = PROFILE_CLASSES.get(local_profile(code, direction), VertexClass.FORBIDDEN)
    if cls is not VertexClass.REGULAR and not is_well_composed(code):
        return VertexClass.FORBIDDEN
    return cls


def lower_link_components(code: int) -> dict[int, int]:
    """Map axis -> component label for every axis direction ``-e_axis`` whose edge
    lies in the body, the label naming the component of the lower link that the
    neighbor ``v - e_axis`` belongs to."""
    simplices = freudenthal_simplices(code)
    link_vertices = sorted({w for s in simplices if _ORIGIN in s for w in s
                            if w != _ORIGIN and sum(w) < 0})
    pos = {w: i for i, w in enumerate(link_vertices)}
    parent = list(range(len(link_vertices)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for s in simplices:
        if _ORIGIN in s and len(s) == 3:
            a, b = (w for w in s if w != _ORIGIN)
            if sum(a) < 0 and sum(b) < 0:
                parent[find(pos[a])] = find(pos[b])
    out = {}
    for axis in range(3):
        w = tuple(-1 if a == axis else 0 for a in range(3))
        if w in pos:
            out[axis] = find(pos[w])
    return out


# ---------------------------------------------------------------------------
# Published list of critical neighborhoods and the 256-entry table


def _code_from_matrices(lower, upper) -> int:
    """Code of a vertex drawn as two 2x2 matrices (slices s3 = -, +), row index
    s2 and column index s1, ``-`` before ``+``."""
    code = 0
    for s3, mat in enumerate((lower, upper)):
        for s2 in range(2):
            for s1 in range(2):
                if mat[s2][s1]:
                    code |= 1 << octant_bit((s1, s2, s3))
    return code


REFERENCE_ROWS = (
    (((0, 0), (0, 0)), ((0, 0), (0, 1)), VertexClass.INDEX0),
    (((0, 1), (1, 1)), ((1, 1), (1, 1)), VertexClass.INDEX2),
    (((0, 0), (0, 0)), ((0, 1), (1, 1)), VertexClass.INDEX1),
    (((0, 0), (0, 1)), ((0, 1), (0, 1)), VertexClass.INDEX1),
    (((0, 0), (0, 1)), ((0, 0), (1, 1)), VertexClass.INDEX1),
    (((0, 0), (0, 1)), ((1, 1), (1, 1)), VertexClass.INDEX1),
    (((0, 1), (0, 1)), ((0, 1), (1, 1)), VertexClass.INDEX1),
    (((0, 0), (1, 1)), ((0, 1), (1, 1)), VertexClass.INDEX1),
    (((0, 1), (0, 0)), ((0, 1), (1, 1)), VertexClass.INDEX1),
    (((0, 0), (1, 1)), ((0, 1), (0, 1)), VertexClass.INDEX1),
    (((0, 0), (0, 1)), ((1, 0), (1, 1)), VertexClass.INDEX1),
    (((0, 0), (1, 0)), ((0, 1), (1, 1)), VertexClass.INDEX1),
    (((0, 0), (0, 1)), ((1, 1), (0, 1)), VertexClass.INDEX1),
    (((0, 1), (0, 1)), ((0, 0), (1, 1)), VertexClass.INDEX1),
    (((0, 0), (0, 1)), ((0, 1), (1, 1)), VertexClass.MONKEY),
)

REFERENCE_CODES = tuple(_code_from_matrices(lo, up) for lo, up, _ in REFERENCE_ROWS)


def reference_orbit() -> dict[int, VertexClass]:
    """Reference rows expanded under the six axis permutations (the symmetries of x+y+z)."""
    out: dict[int, VertexClass] = {}
    for code, (_, _, cls) in zip(REFERENCE_CODES, REFERENCE_ROWS):
        for perm in PERMUTATIONS:
            c = permute_code(code, perm)
            if out.setdefault(c, cls) is not cls:
                raise TableMismatchError([c], f"code {c:#04x} reached by two reference rows")
    return out


def reference_discrepancies(table) -> list[int]:
    """Codes where the critical entries of ``table`` differ from the reference orbit."""
    orbit = reference_orbit()
    bad = []
    for code in range(256):
        cls = VertexClass(table[code])
        critical = cls not in (VertexClass.REGULAR, VertexClass.FORBIDDEN)
        expected = orbit.get(code)
        if (critical and expected is not cls) or (not critical and expected is not None):
            bad.append(code)
    return bad


def generate_classification_table(check: bool = True) -> bytes:
    """Classify all 256 codes with :func:`classify_code_oracle`.

    With ``check``, raise :class:`TableMismatchError` unless the critical entries
    coincide with the permutation orbit of the reference rows.
    """
    table = bytes(int(classify_code_oracle(c)) for c in range(256))
    if check:
        bad = reference_discrepancies(table)
        if bad:
            raise TableMismatchError(bad, "classification differs from the reference list at "
                                     + ", ".join(f"{c:#04x}" for c in bad))
    return table


def format_table(table) -> str:
    """One ``0xNN label`` line per code."""
    return "".join(f"0x{c:02X} {VertexClass(table[c]).label}\n" for c in range(256))
