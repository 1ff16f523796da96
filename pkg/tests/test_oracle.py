from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings

from cubetti._lut import LUT
from cubetti.codes import (
    PERMUTATIONS,
    VertexClass,
    complement_code,
    is_well_composed,
    neighborhood_codes,
    permute_code,
    reverse_code,
)
from cubetti.grid import ShapeSpec, VoxelGrid, generate
from cubetti.morse import euler_cell_count
from cubetti.oracle import (
    REFERENCE_CODES,
    CubicalChainComplex,
    LocalPairProfile,
    OracleSizeError,
    TableMismatchError,
    betti_bruteforce,
    classify_code_oracle,
    components_union_find,
    format_table,
    generate_classification_table,
    local_profile,
    reference_discrepancies,
    reference_orbit,
)
from cubetti.preprocess import preprocess

from conftest import codes, small_grids

TABLE = generate_classification_table()


def triple(r):
    return (r.b0, r.b1, r.b2)


@pytest.mark.parametrize(
    "grid, expected",
    [
        (VoxelGrid.from_cubes((1, 1, 1), [(0, 0, 0)]), (1, 0, 0)),
        (generate(ShapeSpec("shell")), (1, 0, 1)),
        (generate(ShapeSpec("ring")), (1, 1, 0)),
        (generate(ShapeSpec("two-components")), (2, 0, 0)),
        (VoxelGrid.empty(2, 2, 2), (0, 0, 0)),
        # a 3x3x3 shell with the top face removed is a cup: contractible
        (VoxelGrid(generate(ShapeSpec("shell")).occupancy & ~(np.indices((3, 3, 3))[2] == 2)
                   | (np.indices((3, 3, 3))[2] < 0)), (1, 0, 0)),
    ],
)
def test_bruteforce_known_shapes(grid, expected):
    assert triple(betti_bruteforce(grid)) == expected


def test_bruteforce_torus_and_two_rings():
    occ = np.zeros((5, 5, 3), dtype=bool)
    occ[1:4, 1:4, 1] = True
    occ[2, 2, 1] = False
    assert triple(betti_bruteforce(VoxelGrid(occ))) == (1, 1, 0)
    occ2 = np.concatenate([occ, occ], axis=0)
    assert triple(betti_bruteforce(VoxelGrid(occ2))) == (2, 2, 0)


def test_size_guard():
    with pytest.raises(OracleSizeError):
        betti_bruteforce(generate(ShapeSpec("solid-box", (10, 10, 10))), max_cells=100)


@settings(max_examples=40, deadline=None)
@given(small_grids(max_side=4))
def test_chain_complex_is_a_complex(g):
    cx = CubicalChainComplex.from_grid(g)
    d = {k: cx.boundary_dense(k).astype(np.int64) for k in (1, 2, 3)}
    for k, w in ((1, 2), (2, 4), (3, 6)):
        if d[k].size:
            assert set(d[k].sum(axis=0).tolist()) == {w}
    for k in (1, 2):
        if d[k].size and d[k + 1].size:
            assert not ((d[k] @ d[k + 1]) % 2).any()


@settings(max_examples=60, deadline=None)
@given(small_grids(max_side=4))
def test_bruteforce_chi_equals_cell_count(g):
    assert betti_bruteforce(g).chi == euler_cell_count(g)


@settings(max_examples=30, deadline=None)
@given(small_grids(max_side=3))
def test_bruteforce_b0_equals_union_find_on_unstacked(g):
    body, _ = preprocess(g)
    assert betti_bruteforce(body).b0 == components_union_find(body)


def test_union_find_examples():
    assert components_union_find(VoxelGrid.empty(2, 2, 2)) == 0
    assert components_union_find(VoxelGrid.from_cubes((2, 1, 1), [(0, 0, 0), (1, 0, 0)])) == 1
    assert components_union_find(VoxelGrid.from_cubes((2, 2, 1), [(0, 0, 0), (1, 1, 0)])) == 2


def test_classify_examples():
    assert classify_code_oracle(0x80) is VertexClass.INDEX0
    assert classify_code_oracle(0xFE) is VertexClass.INDEX2
    assert classify_code_oracle(0xE8) is VertexClass.MONKEY
    assert classify_code_oracle(0xFF) is VertexClass.REGULAR
    assert classify_code_oracle(0x00) is VertexClass.REGULAR
    assert classify_code_oracle(0x01) is VertexClass.REGULAR
    # two cubes meeting only at v: both local sublevel sets have the same homotopy type
    assert local_profile(0x81) == LocalPairProfile(0, 0, 0)
    assert classify_code_oracle(0x81) is VertexClass.REGULAR


def test_profile_census():
    census = Counter(tuple(local_profile(c)) for c in range(256))
    assert census == {(0, 0, 0): 207, (0, 1, 0): 30, (0, 0, 1): 16, (0, 2, 0): 2, (1, 0, 0): 1}
    assert (0, 0, 2) not in census


@given(codes)
def test_classification_is_permutation_invariant(c):
    cls = classify_code_oracle(c)
    for p in PERMUTATIONS:
        assert classify_code_oracle(permute_code(c, p)) is cls


@given(codes)
def test_reflection_identity(c):
    assert classify_code_oracle(c, direction=-1) is classify_code_oracle(reverse_code(c))


def test_index_duality_on_well_composed_codes():
    flip = {VertexClass.INDEX0: VertexClass.INDEX2, VertexClass.INDEX2: VertexClass.INDEX0}
    for c in range(256):
        if not is_well_composed(c):
            continue
        a = classify_code_oracle(c)
        b = classify_code_oracle(reverse_code(complement_code(c)))
        assert flip.get(a, a) is b, hex(c)


def test_well_composed_count():
    assert sum(map(is_well_composed, range(256))) == 128


def test_table_matches_reference_orbit():
    orbit = reference_orbit()
    assert len(orbit) == 15
    assert set(orbit) == {c for c in range(256)
                          if VertexClass(TABLE[c]) not in (VertexClass.REGULAR, VertexClass.FORBIDDEN)}
    assert REFERENCE_CODES[0] == 0x80 and REFERENCE_CODES[1] == 0xFE and REFERENCE_CODES[-1] == 0xE8
    assert reference_discrepancies(TABLE) == []


def test_table_census_regression():
    census = Counter(VertexClass(b) for b in TABLE)
    assert census == {VertexClass.REGULAR: 207, VertexClass.FORBIDDEN: 34, VertexClass.INDEX1: 12,
                      VertexClass.INDEX0: 1, VertexClass.INDEX2: 1, VertexClass.MONKEY: 1}
    assert all(not is_well_composed(c) for c in range(256) if TABLE[c] == VertexClass.FORBIDDEN)


def test_shipped_lut_is_byte_identical():
    assert LUT == TABLE


def test_reference_discrepancy_is_reported():
    corrupted = bytearray(TABLE)
    corrupted[0xE8] = VertexClass.INDEX1
    assert reference_discrepancies(corrupted) == [0xE8]
    corrupted[0x80] = VertexClass.REGULAR
    assert reference_discrepancies(corrupted) == [0x80, 0xE8]
    assert isinstance(TableMismatchError([1], "x"), AssertionError)


def test_table_dump_format():
    lines = format_table(TABLE).splitlines()
    assert len(lines) == 256
    assert lines[0xE8] == "0xE8 monkey" and lines[0x80] == "0x80 index0" and lines[0] == "0x00 regular"


def test_neighborhood_codes_examples():
    one = VoxelGrid.from_cubes((1, 1, 1), [(0, 0, 0)])
    c = neighborhood_codes(one.occupancy)
    assert c.shape == (2, 2, 2)
    assert c[0, 0, 0] == 0x80 and c[1, 1, 1] == 0x01
    assert neighborhood_codes(np.ones((3, 3, 3), bool))[1, 1, 1] == 0xFF
