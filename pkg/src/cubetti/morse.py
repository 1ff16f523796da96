"""Discrete Morse sweep of the diagonal height function x + y + z.

``sweep`` walks the body's vertices upward, sends every vertex to a minimum
along its greatest descending edge and records, for each index-1 point, the two
minima reached from its two sides: that is the matrix of the first boundary
operator. ``dual_sweep`` repeats the walk for the negated height on the
complement, which by Alexander duality yields the second boundary operator.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple

import numpy as np
from numba import njit

from . import gf2
from ._lut import LUT
from .codes import VertexClass, is_well_composed, neighborhood_codes, octant_bit
from .gf2 import Gf2Matrix
from .grid import VoxelGrid, complement, reflect
from .preprocess import PreprocessReport, preprocess

log = logging.getLogger(__name__)

CLASS_TABLE = np.frombuffer(LUT, dtype=np.uint8).astype(np.int8)

X_AXIS, Y_AXIS, Z_AXIS = 0, 1, 2
# greatest first
DIRECTION_ORDER = (Z_AXIS, Y_AXIS, X_AXIS)
UNIT = ((1, 0, 0), (0, 1, 0), (0, 0, 1))


class ForbiddenVertexError(RuntimeError):
    def __init__(self, vertex, code: int):
        super().__init__(f"unstacking invariant violated at {tuple(vertex)} (code 0x{code:02X})")
        self.vertex = tuple(int(v) for v in vertex)
        self.code = code


class PassMismatchError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# Per-code geometry


def neighborhood_code(grid: VoxelGrid, vertex) -> int:
    nx, ny, nz = grid.dims
    x, y, z = vertex
    if not (0 <= x <= nx and 0 <= y <= ny and 0 <= z <= nz):
        raise ValueError(f"vertex {tuple(vertex)} outside [0,{nx}]x[0,{ny}]x[0,{nz}]")
    code = 0
    for b in range(8):
        if grid[(x - 1 + (b & 1), y - 1 + (b >> 1 & 1), z - 1 + (b >> 2 & 1))]:
            code |= 1 << b
    return code


def classify(code: int) -> VertexClass:
    return VertexClass(LUT[code])


def _edge_cubes(axis: int) -> list[int]:
    """Octants containing the edge from v to v - e_axis."""
    return [b for b in range(8) if not b >> axis & 1]


def lower_edge_in_body(code: int, axis: int) -> bool:
    return any(code >> b & 1 for b in _edge_cubes(axis))


def lower_edge_on_boundary(code: int, axis: int) -> bool:
    n = sum(code >> b & 1 for b in _edge_cubes(axis))
    return 0 < n < 4


def lower_square_on_boundary(code: int, a: int, b: int) -> bool:
    """Whether the square spanned by -e_a and -e_b at v is a boundary face."""
    c = 3 - a - b
    s = [0, 0, 0]
    n = 0
    for sc in (0, 1):
        s[c] = sc
        n += code >> octant_bit(s) & 1
    return n == 1


def _index1_directions(code: int) -> tuple[int, int]:
    edges = [a for a in DIRECTION_ORDER if lower_edge_on_boundary(code, a)]
    if len(edges) == 2:
        return edges[0], edges[1]
    if len(edges) == 3:
        pairs = [(a, b) for i, a in enumerate(edges) for b in edges[i + 1:]
                 if lower_square_on_boundary(code, a, b)]
        if len(pairs) != 1:
            raise AssertionError(f"code 0x{code:02X}: {len(pairs)} boundary squares among descending edges")
        same = pairs[0]
        (lone,) = [a for a in edges if a not in same]
        if edges[0] == lone:
            return lone, same[0]
        return edges[0], lone
    raise AssertionError(f"code 0x{code:02X}: index-1 vertex with {len(edges)} descending boundary edges")


def _build_descent_tables():
    down1 = np.full(256, -1, dtype=np.int8)
    down2 = np.full(256, -1, dtype=np.int8)
    for code in range(1, 256):
        cls = classify(code)
        if cls in (VertexClass.INDEX0, VertexClass.FORBIDDEN):
            continue
        if cls is VertexClass.INDEX1:
            down1[code], down2[code] = _index1_directions(code)
        elif cls is VertexClass.MONKEY:
            down1[code], down2[code] = X_AXIS, Y_AXIS
        else:
            down1[code] = next(a for a in DIRECTION_ORDER if lower_edge_in_body(code, a))
    return down1, down2


DOWN1, DOWN2 = _build_descent_tables()


class DescentTargets(NamedTuple):
    down1: tuple[int, int, int]
    down2: tuple[int, int, int] | None
    fictive: tuple[tuple[int, int, int], tuple[int, int, int]] | None


def _step(v, axis):
    return tuple(int(v[a]) - (1 if a == axis else 0) for a in range(3))


def descent_targets(grid: VoxelGrid, v, cls: VertexClass | None = None) -> DescentTargets:
    """Ends of the descending edges the sweep follows from ``v``.

    For a monkey saddle, ``fictive`` holds ``(Down_1, Down_2)`` of the double:
    the saddle itself and ``v - e_z``.
    """
    code = neighborhood_code(grid, v)
    if cls is None:
        cls = classify(code)
    if cls is VertexClass.FORBIDDEN:
        raise ForbiddenVertexError(v, code)
    if cls is VertexClass.INDEX0 or DOWN1[code] < 0:
        raise ValueError(f"vertex {tuple(v)} (code 0x{code:02X}) has no descending edge")
    d1 = _step(v, DOWN1[code])
    if cls is VertexClass.INDEX1:
        return DescentTargets(d1, _step(v, DOWN2[code]), None)
    if cls is VertexClass.MONKEY:
        return DescentTargets(d1, _step(v, DOWN2[code]), (tuple(int(c) for c in v), _step(v, Z_AXIS)))
    return DescentTargets(d1, None, None)


# ---------------------------------------------------------------------------
# The sweep


@dataclass(frozen=True)
class CriticalPoint:
    vertex: tuple[int, int, int]
    cls: VertexClass
    is_double: bool
    ordinal: int


_ERR_NONE, _ERR_FORBIDDEN, _ERR_UNVISITED = 0, 1, 2
_C_INDEX0, _C_INDEX1, _C_MONKEY, _C_FORBIDDEN = 1, 2, 4, 5


@njit(cache=True, nogil=True)
def _sweep_kernel(codes, cls_table, down1, down2, n0, n1):
    nx, ny, nz = codes.shape
    gf = np.full(codes.shape, -1, dtype=np.int32)
    c0 = np.empty((n0, 3), dtype=np.int32)
    c1 = np.empty((n1, 3), dtype=np.int32)
    c1_double = np.zeros(n1, dtype=np.bool_)
    rows = np.empty(2 * n1, dtype=np.int64)
    cols = np.empty(2 * n1, dtype=np.int64)
    k0 = 0
    k1 = 0
    ne = 0
    bad = np.zeros(4, dtype=np.int64)
    for s in range(nx + ny + nz - 2):
        for x in range(max(0, s - (ny - 1) - (nz - 1)), min(nx - 1, s) + 1):
            for y in range(max(0, s - x - (nz - 1)), min(ny - 1, s - x) + 1):
                z = s - x - y
                code = codes[x, y, z]
                if code == 0:
                    continue
                c = cls_table[code]
                if c == _C_INDEX0:
                    c0[k0, 0] = x
                    c0[k0, 1] = y
                    c0[k0, 2] = z
                    gf[x, y, z] = k0
                    k0 += 1
                    continue
                if c == _C_FORBIDDEN:
                    bad[0] = _ERR_FORBIDDEN
                    bad[1] = x
                    bad[2] = y
                    bad[3] = z
                    return gf, c0, c1, c1_double, rows, cols, k0, k1, ne, bad
                a = down1[code]
                g1 = gf[x - (a == 0), y - (a == 1), z - (a == 2)]
                if g1 < 0:
                    bad[0] = _ERR_UNVISITED
                    bad[1] = x
                    bad[2] = y
                    bad[3] = z
                    return gf, c0, c1, c1_double, rows, cols, k0, k1, ne, bad
                gf[x, y, z] = g1
                if c == _C_INDEX1 or c == _C_MONKEY:
                    b = down2[code]
                    g2 = gf[x - (b == 0), y - (b == 1), z - (b == 2)]
                    c1[k1, 0] = x
                    c1[k1, 1] = y
                    c1[k1, 2] = z
                    if g1 != g2:
                        rows[ne] = k1
                        cols[ne] = g1
                        rows[ne + 1] = k1
                        cols[ne + 1] = g2
                        ne += 2
                    k1 += 1
                    if c == _C_MONKEY:
                        # the double: Down_1 is the saddle (sink g1), Down_2 is v - e_z
                        g3 = gf[x, y, z - 1]
                        c1[k1, 0] = x
                        c1[k1, 1] = y
                        c1[k1, 2] = z
                        c1_double[k1] = True
                        if g1 != g3:
                            rows[ne] = k1
                            cols[ne] = g1
                            rows[ne + 1] = k1
                            cols[ne + 1] = g3
                            ne += 2
                        k1 += 1
    return gf, c0, c1, c1_double, rows, cols, k0, k1, ne, bad


@dataclass(frozen=True, eq=False)
class SweepResult:
    """Output of one upward sweep.

    ``c0`` and ``c1`` hold vertex coordinates (one row per basis element, in
    visiting order); ``c1_double`` flags the fictive doubles of monkey saddles.
    ``gf[v]`` is the ordinal in ``c0`` of the minimum reached from ``v`` (-1 off
    the body). ``d1_rows``/``d1_cols`` are the set entries of the boundary matrix,
    rows indexed by ``c1`` and columns by ``c0``.
    """

    c0: np.ndarray
    c1: np.ndarray
    c1_double: np.ndarray
    gf: np.ndarray
    d1_rows: np.ndarray
    d1_cols: np.ndarray

    @cached_property
    def d1(self) -> Gf2Matrix:
        return Gf2Matrix.from_entries(len(self.c1), len(self.c0), self.d1_rows, self.d1_cols)

    @property
    def n_monkey(self) -> int:
        return int(np.count_nonzero(self.c1_double))

    def critical_points(self) -> tuple[list[CriticalPoint], list[CriticalPoint]]:
        monkey = set(map(tuple, self.c1[self.c1_double].tolist()))
        pts0 = [CriticalPoint(tuple(v), VertexClass.INDEX0, False, i) for i, v in enumerate(self.c0.tolist())]
        pts1 = []
        for i, (v, dbl) in enumerate(zip(self.c1.tolist(), self.c1_double.tolist())):
            cls = VertexClass.MONKEY if tuple(v) in monkey else VertexClass.INDEX1
            pts1.append(CriticalPoint(tuple(v), cls, bool(dbl), i))
        return pts0, pts1


def sweep(grid: VoxelGrid) -> SweepResult:
    """Visit the body's vertices by increasing x+y+z (ties lexicographic) and run
    the minimum-assignment / boundary-matrix loop."""
    codes = neighborhood_codes(grid.occupancy)
    counts = np.bincount(CLASS_TABLE[codes].ravel(), minlength=6)
    n0 = int(counts[VertexClass.INDEX0])
    n1 = int(counts[VertexClass.INDEX1] + 2 * counts[VertexClass.MONKEY])
    gf, c0, c1, c1_double, rows, cols, k0, k1, ne, bad = _sweep_kernel(
        codes, CLASS_TABLE, DOWN1, DOWN2, n0, n1)
    if bad[0] == _ERR_FORBIDDEN:
        v = tuple(int(t) for t in bad[1:])
        raise ForbiddenVertexError(v, int(codes[v]))
    if bad[0] == _ERR_UNVISITED:
        raise AssertionError(f"descent from {tuple(bad[1:].tolist())} reached an unvisited vertex")
    assert k0 == n0 and k1 == n1
    return SweepResult(c0, c1, c1_double, gf, rows[:ne].copy(), cols[:ne].copy())


@dataclass(frozen=True, eq=False)
class DualResult:
    """The sweep of -(x+y+z) on the complement, in the body's coordinates.

    ``c2`` lists the complement's minima other than the corner ``p0`` (these span
    C2); ``c1``/``c1_double`` its index-1 points. ``d2`` has rows indexed by
    ``c1`` and columns by ``c2``.
    """

    c2: np.ndarray
    c1: np.ndarray
    c1_double: np.ndarray
    p0: tuple[int, int, int]
    d2_rows: np.ndarray
    d2_cols: np.ndarray

    @property
    def c2_dim(self) -> int:
        return len(self.c2)

    @cached_property
    def d2(self) -> Gf2Matrix:
        return Gf2Matrix.from_entries(len(self.c1), len(self.c2), self.d2_rows, self.d2_cols)


def touches_box(grid: VoxelGrid) -> bool:
    occ = grid.occupancy
    return bool(occ[0].any() or occ[-1].any() or occ[:, 0].any() or occ[:, -1].any()
                or occ[:, :, 0].any() or occ[:, :, -1].any())


def dual_sweep(grid: VoxelGrid) -> DualResult:
    if touches_box(grid):
        raise ValueError("body touches the bounding box; preprocess or pad it first")
    nx, ny, nz = grid.dims
    res = sweep(reflect(complement(grid)))
    # the reflected box corner (0,0,0) is the first vertex visited; it is the
    # minimum of -(x+y+z) and always a sink of its own
    if len(res.c0) == 0 or tuple(res.c0[0].tolist()) != (0, 0, 0):
        raise ValueError("corner minimum p0 not found; pad the body away from the box")
    top = np.array([nx, ny, nz], dtype=np.int32)
    keep = res.d1_cols != 0
    return DualResult(
        c2=top - res.c0[1:],
        c1=top - res.c1,
        c1_double=res.c1_double,
        p0=(nx, ny, nz),
        d2_rows=res.d1_rows[keep],
        d2_cols=res.d1_cols[keep] - 1,
    )


# ---------------------------------------------------------------------------
# Betti numbers


@dataclass
class BettiReport:
    b0: int
    b1: int
    b2: int
    chi: int
    n_c: int
    dim_c0: int
    dim_c1: int
    dim_c2: int
    rank_d1: int
    rank_d2: int
    n_monkey: int = 0
    timings: dict[str, float] = field(default_factory=dict)

    @property
    def betti(self) -> tuple[int, int, int]:
        return (self.b0, self.b1, self.b2)


def betti(sw: SweepResult, dual: DualResult) -> BettiReport:
    if len(sw.c1) != len(dual.c1):
        raise PassMismatchError(f"index-1 counts differ between passes: {len(sw.c1)} (f) vs {len(dual.c1)} (h)")
    t = time.perf_counter()
    r1 = gf2.rank(sw.d1)
    r2 = gf2.rank(dual.d2)
    t_rank = time.perf_counter() - t
    dim0, dim1, dim2 = len(sw.c0), len(sw.c1), dual.c2_dim
    b0 = dim0 - r1
    b1 = dim1 - r1 - r2
    b2 = dim2 - r2
    if min(b0, b1, b2) < 0:
        raise AssertionError(f"negative Betti number ({b0}, {b1}, {b2})")
    return BettiReport(b0, b1, b2, b0 - b1 + b2, dim0 + dim1 + dim2 + 1, dim0, dim1, dim2, r1, r2,
                       sw.n_monkey, {"rank": t_rank})


def euler_cell_count(grid: VoxelGrid) -> int:
    """V - E + F - C over the cells of the closed union of occupied cubes."""
    occ = grid.occupancy
    p = np.pad(occ, 1)
    nx, ny, nz = occ.shape
    total = 0
    # a cell spanning the axes in `span` belongs to its own cube along those axes
    # and to the cubes offset by 0/-1 along each remaining axis
    for span in np.ndindex(2, 2, 2):
        shape = tuple(n + 1 - s for n, s in zip((nx, ny, nz), span))
        present = np.zeros(shape, dtype=bool)
        for off in np.ndindex(2, 2, 2):
            if any(o and s for o, s in zip(off, span)):
                continue
            lo = [o + s for o, s in zip(off, span)]
            present |= p[lo[0]:lo[0] + shape[0], lo[1]:lo[1] + shape[1], lo[2]:lo[2] + shape[2]]
        total += (-1) ** sum(span) * int(np.count_nonzero(present))
    return total


# ---------------------------------------------------------------------------
# Whole pipeline


@dataclass
class MorseResult:
    body: VoxelGrid
    sweep: SweepResult
    dual: DualResult
    report: BettiReport
    preprocess_report: PreprocessReport | None = None


def analyze(grid: VoxelGrid, unstack: bool = True) -> MorseResult:
    """Preprocess (unless ``unstack`` is false), run both sweeps, assemble Betti numbers."""
    timings = {}
    t = time.perf_counter()
    prep_report = None
    if unstack:
        body, prep_report = preprocess(grid)
    else:
        body = grid
    timings["preprocess"] = time.perf_counter() - t
    t = time.perf_counter()
    sw = sweep(body)
    timings["f_pass"] = time.perf_counter() - t
    t = time.perf_counter()
    du = dual_sweep(body)
    timings["h_pass"] = time.perf_counter() - t
    report = betti(sw, du)
    report.timings = {**timings, **report.timings}
    return MorseResult(body, sw, du, report, prep_report)


class ChainDiagnostic(NamedTuple):
    identified: bool
    boundary_squared_zero: bool
    message: str


def chain_diagnostic(sw: SweepResult, dual: DualResult) -> ChainDiagnostic:
    """Check D1^T * D2 = 0 after matching index-1 generators of the two passes by
    vertex (doubles with doubles). Failures are logged as warnings."""
    f_rows = {(tuple(v), bool(d)): i for i, (v, d) in enumerate(zip(sw.c1.tolist(), sw.c1_double.tolist()))}
    perm = []
    for v, d in zip(dual.c1.tolist(), dual.c1_double.tolist()):
        i = f_rows.get((tuple(v), bool(d)))
        if i is None:
            msg = f"h-pass index-1 point {tuple(v)} (double={bool(d)}) has no f-pass counterpart"
            log.warning(msg)
            return ChainDiagnostic(False, False, msg)
        perm.append(i)
    if len(perm) != len(f_rows):
        msg = "index-1 sets of the two passes differ"
        log.warning(msg)
        return ChainDiagnostic(False, False, msg)
    # D1^T D2 over GF(2), accumulated sparsely: entry (i, j) flips once per
    # index-1 generator r with D1[r, i] = D2[r, j] = 1
    d1_by_row: dict[int, list[int]] = {}
    for r, c in zip(sw.d1_rows.tolist(), sw.d1_cols.tolist()):
        d1_by_row.setdefault(r, []).append(c)
    odd: set[tuple[int, int]] = set()
    perm_arr = np.asarray(perm, dtype=np.int64)
    for r_h, j in zip(dual.d2_rows.tolist(), dual.d2_cols.tolist()):
        for i in d1_by_row.get(int(perm_arr[r_h]), ()):
            odd ^= {(i, j)}
    if odd:
        msg = f"D1^T D2 has {len(odd)} nonzero entries"
        log.warning(msg)
        return ChainDiagnostic(True, False, msg)
    return ChainDiagnostic(True, True, "ok")


def well_composed_violations(grid: VoxelGrid) -> np.ndarray:
    """Vertices whose neighborhood code is not well-composed, as an ``(n, 3)`` array."""
    codes = neighborhood_codes(grid.occupancy)
    bad = np.array([not is_well_composed(c) for c in range(256)])
    return np.argwhere(bad[codes])
