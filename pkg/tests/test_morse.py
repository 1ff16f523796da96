import numpy as np
import pytest
from hypothesis import given, settings

from cubetti import gf2
from cubetti.codes import VertexClass, is_well_composed
from cubetti.grid import ShapeSpec, VoxelGrid, complement, generate
from cubetti.morse import (
    DOWN1,
    DOWN2,
    X_AXIS,
    Y_AXIS,
    Z_AXIS,
    DualResult,
    ForbiddenVertexError,
    PassMismatchError,
    analyze,
    betti,
    chain_diagnostic,
    classify,
    descent_targets,
    dual_sweep,
    euler_cell_count,
    lower_edge_in_body,
    lower_edge_on_boundary,
    neighborhood_code,
    sweep,
)
from cubetti.oracle import betti_bruteforce, components_union_find, lower_link_components
from cubetti.preprocess import pad, preprocess

from conftest import small_grids

INDEX1_CODES = [c for c in range(256) if classify(c) is VertexClass.INDEX1]
MONKEY_CUBES = [(1, 1, 0), (1, 0, 1), (0, 1, 1), (1, 1, 1)]


def monkey_body():
    """Four cubes around the vertex (2,2,2) in the monkey-saddle arrangement, already
    free of edge and vertex contacts."""
    return pad(VoxelGrid.from_cubes((2, 2, 2), MONKEY_CUBES), 1)


def forbidden_body():
    """Two cubes meeting only at (2,2,2), in octants 3 and 4 of that vertex (code 0x18)."""
    return pad(VoxelGrid.from_cubes((2, 2, 2), [(1, 1, 0), (0, 0, 1)]), 1)


def test_neighborhood_code_examples():
    one = VoxelGrid.from_cubes((1, 1, 1), [(0, 0, 0)])
    assert neighborhood_code(one, (0, 0, 0)) == 0x80
    assert neighborhood_code(one, (1, 1, 1)) == 0x01
    assert neighborhood_code(generate(ShapeSpec("solid-box", (2, 2, 2))), (1, 1, 1)) == 0xFF
    with pytest.raises(ValueError):
        neighborhood_code(one, (2, 0, 0))


def test_classify_examples():
    assert classify(0x80) is VertexClass.INDEX0
    assert classify(0xFE) is VertexClass.INDEX2
    assert classify(0xE8) is VertexClass.MONKEY
    assert classify(0xFF) is classify(0x00) is classify(0x01) is VertexClass.REGULAR


def test_regular_descends_along_z_first():
    assert DOWN1[0xFF] == Z_AXIS
    g = generate(ShapeSpec("solid-box", (2, 2, 2)))
    assert descent_targets(g, (1, 1, 1)).down1 == (1, 1, 0)


def test_index1_with_two_boundary_edges_x_and_z():
    hits = [c for c in INDEX1_CODES
            if [a for a in range(3) if lower_edge_on_boundary(c, a)] == [X_AXIS, Z_AXIS]]
    assert hits
    for c in hits:
        assert (DOWN1[c], DOWN2[c]) == (Z_AXIS, X_AXIS)


def test_index1_lower_edges_are_boundary_edges():
    for c in INDEX1_CODES:
        for a in range(3):
            if lower_edge_in_body(c, a):
                assert lower_edge_on_boundary(c, a), hex(c)


def test_index1_label_rule_matches_lower_link():
    """The two descent directions land in different components of the lower link;
    with three descending edges the pair spanning a boundary square shares one."""
    for c in INDEX1_CODES:
        comp = lower_link_components(c)
        assert len(set(comp.values())) == 2, hex(c)
        assert comp[DOWN1[c]] != comp[DOWN2[c]], hex(c)
        greatest = next(a for a in (Z_AXIS, Y_AXIS, X_AXIS) if a in comp)
        assert DOWN1[c] == greatest


def test_monkey_directions():
    comp = lower_link_components(0xE8)
    assert len({comp[X_AXIS], comp[Y_AXIS], comp[Z_AXIS]}) == 3
    g = monkey_body()
    t = descent_targets(g, (2, 2, 2))
    assert t.down1 == (1, 2, 2) and t.down2 == (2, 1, 2)
    assert t.fictive == ((2, 2, 2), (2, 2, 1))


def test_descent_errors():
    one = pad(VoxelGrid.from_cubes((1, 1, 1), [(0, 0, 0)]), 1)
    with pytest.raises(ValueError):
        descent_targets(one, (1, 1, 1))
    with pytest.raises(ForbiddenVertexError, match=r"unstacking invariant violated at \(2, 2, 2\)"):
        descent_targets(forbidden_body(), (2, 2, 2))


def test_sweep_forbidden_is_hard_error():
    with pytest.raises(ForbiddenVertexError) as exc:
        sweep(forbidden_body())
    assert exc.value.vertex == (2, 2, 2) and exc.value.code == 0x18
    with pytest.raises(ForbiddenVertexError):
        analyze(forbidden_body(), unstack=False)
    # after unstacking the same cubes are harmless
    assert analyze(forbidden_body()).report.betti == (2, 0, 0)


def test_sweep_single_cube():
    body, _ = preprocess(VoxelGrid.from_cubes((1, 1, 1), [(0, 0, 0)]))
    sw = sweep(body)
    assert sw.c0.tolist() == [[2, 2, 2]] and len(sw.c1) == 0
    assert sw.d1.shape == (0, 1)
    body_vertices = np.zeros(sw.gf.shape, dtype=bool)
    body_vertices[2:4, 2:4, 2:4] = True
    assert (sw.gf[body_vertices] == 0).all() and (sw.gf[~body_vertices] == -1).all()


def test_sweep_two_cubes():
    body, _ = preprocess(generate(ShapeSpec("two-components")))
    sw = sweep(body)
    assert (len(sw.c0), len(sw.c1)) == (2, 0)


def test_ring_pipeline():
    r = analyze(generate(ShapeSpec("ring")))
    assert len(r.sweep.c0) - gf2.rank(r.sweep.d1) == 1
    assert len(r.sweep.c1) >= 1
    assert r.report.betti == (1, 1, 0) and r.report.chi == 0


def test_dual_single_cube_and_shell():
    body, _ = preprocess(VoxelGrid.from_cubes((1, 1, 1), [(0, 0, 0)]))
    du = dual_sweep(body)
    assert du.c2_dim == 0 and du.d2.shape == (0, 0) and du.p0 == (5, 5, 5)
    # erosion keeps the cubes along the cavity's edges, so the cavity is a core with
    # six slabs: three h-minima joined by one monkey saddle, still one cavity
    shell, _ = preprocess(generate(ShapeSpec("shell")))
    du = dual_sweep(shell)
    assert sorted(du.c2.tolist()) == [[7, 7, 8], [7, 8, 7], [8, 7, 7]]
    assert du.c1.tolist() == [[7, 7, 7], [7, 7, 7]] and du.c1_double.tolist() == [False, True]
    assert du.c2_dim - gf2.rank(du.d2) == 1


def test_dual_requires_interior_body():
    with pytest.raises(ValueError, match="preprocess"):
        dual_sweep(VoxelGrid.from_cubes((1, 1, 1), [(0, 0, 0)]))


def test_empty_body_report():
    r = analyze(VoxelGrid.empty(2, 2, 2))
    assert r.report.betti == (0, 0, 0) and r.report.chi == 0
    assert r.report.n_c == 1  # only the corner sink p0


def test_pass_mismatch_is_hard_error():
    body, _ = preprocess(generate(ShapeSpec("ring")))
    sw, du = sweep(body), dual_sweep(body)
    short = DualResult(du.c2, du.c1[:-1], du.c1_double[:-1], du.p0,
                       du.d2_rows[du.d2_rows < len(du.c1) - 1], du.d2_cols[du.d2_rows < len(du.c1) - 1])
    with pytest.raises(PassMismatchError):
        betti(sw, short)


def test_monkey_body():
    r = analyze(monkey_body(), unstack=False)
    assert r.report.n_monkey == 1
    pts0, pts1 = r.sweep.critical_points()
    doubles = [p for p in pts1 if p.is_double]
    assert len(doubles) == 1 and doubles[0].vertex == (2, 2, 2) and doubles[0].cls is VertexClass.MONKEY
    o = betti_bruteforce(r.body)
    assert r.report.betti == (o.b0, o.b1, o.b2) == (1, 0, 0)
    assert chain_diagnostic(r.sweep, r.dual).boundary_squared_zero


def test_euler_examples():
    assert euler_cell_count(VoxelGrid.from_cubes((1, 1, 1), [(0, 0, 0)])) == 1
    assert euler_cell_count(generate(ShapeSpec("two-components"))) == 2
    assert euler_cell_count(generate(ShapeSpec("shell"))) == 2
    assert euler_cell_count(generate(ShapeSpec("ring"))) == 0


@settings(max_examples=60, deadline=None)
@given(small_grids(max_side=4))
def test_pipeline_properties(g):
    r = analyze(g)
    sw, du, rep = r.sweep, r.dual, r.report
    # every body vertex reaches a sink; sinks map to themselves
    codes_nonzero = sw.gf >= 0
    assert codes_nonzero.sum() == np.count_nonzero(_body_vertices(r.body))
    for i, v in enumerate(sw.c0.tolist()):
        assert sw.gf[tuple(v)] == i
    # rows of D1 carry 0 or 2 ones
    for m in (sw.d1, ):
        assert set(m.row_weights().tolist()) <= {0, 2}
    assert len(sw.c0) - len(sw.c1) + du.c2_dim == euler_cell_count(r.body) == rep.chi
    assert rep.b2 == components_union_find(complement(r.body)) - 1
    o = betti_bruteforce(r.body)
    assert rep.betti == (o.b0, o.b1, o.b2)


def _body_vertices(g):
    occ = np.pad(g.occupancy, 1)
    nx, ny, nz = g.dims
    out = np.zeros((nx + 1, ny + 1, nz + 1), dtype=bool)
    for s in np.ndindex(2, 2, 2):
        out |= occ[s[0]:s[0] + nx + 1, s[1]:s[1] + ny + 1, s[2]:s[2] + nz + 1]
    return out


@settings(max_examples=40, deadline=None)
@given(small_grids(max_side=4))
def test_gf_follows_down1(g):
    body, _ = preprocess(g)
    sw = sweep(body)
    from cubetti.codes import neighborhood_codes
    codes = neighborhood_codes(body.occupancy)
    for v in map(tuple, np.argwhere(codes > 0)):
        c = int(codes[v])
        if classify(c) is VertexClass.INDEX0:
            continue
        d = list(v)
        d[DOWN1[c]] -= 1
        assert sw.gf[v] == sw.gf[tuple(d)]


def test_chain_diagnostic_golden():
    for kind in ("solid-box", "shell", "ring", "two-components"):
        r = analyze(generate(ShapeSpec(kind)))
        diag = chain_diagnostic(r.sweep, r.dual)
        assert diag.identified and diag.boundary_squared_zero, kind


def test_descent_tables_cover_body_codes():
    for c in range(1, 256):
        cls = classify(c)
        if cls in (VertexClass.INDEX0, VertexClass.FORBIDDEN):
            assert DOWN1[c] == -1
        else:
            assert lower_edge_in_body(c, DOWN1[c])
        if cls in (VertexClass.INDEX1, VertexClass.MONKEY):
            assert DOWN2[c] >= 0 and DOWN2[c] != DOWN1[c]
        if cls is VertexClass.FORBIDDEN:
            assert not is_well_composed(c)
