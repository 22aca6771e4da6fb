"""Disk conditions, triangle shapes, simplicial machinery, link condition."""

import itertools
from fractions import Fraction

import networkx as nx
import pytest

from cat0complex.exactnum import QField
from cat0complex.tricomplex import (
    DiskCondition,
    LinkGraph,
    MarginError,
    SimplicialSet,
    TriComplex,
    check_link_condition,
    dumps,
    free_edge_violations,
    is_simply_connected,
    loads,
    triangle_shape,
    validate_complex,
    validate_disk_condition,
)

BASE = {(6, 6, 6), (4, 8, 8), (4, 6, 12)}


def test_disk_condition_gate_exhaustive():
    # accepted iff 1/n1 + 1/n2 + 1/n3 <= 1/2; base = the three flat triples
    for t in itertools.product(range(1, 17), repeat=3):
        res = validate_disk_condition(DiskCondition(*t))
        expect = Fraction(1, t[0]) + Fraction(1, t[1]) + Fraction(1, t[2]) <= Fraction(1, 2)
        assert res.accepted == expect, t
        if tuple(sorted(t)) in {tuple(sorted(b)) for b in BASE}:
            assert res.code == "base" and res.base == t
        elif expect:
            assert res.code == "strict-out-of-scope" and res.base is None
        else:
            assert res.code == "rejected"


def test_disk_condition_rejects_nonpositive():
    with pytest.raises(ValueError):
        DiskCondition(0, 6, 6)


def test_triangle_shapes_exact():
    expected = {
        (6, 6, 6): {QField.rational(1)},
        (4, 8, 8): {QField.rational(1), QField.rational(2)},
        (4, 6, 12): {QField.rational(1), QField.rational(3), QField.rational(4)},
    }
    for triple, sides in expected.items():
        shape = triangle_shape(DiskCondition(*triple))
        assert set(shape.side_sq) == sides
        # angle 2*pi/n_i at the type-i vertex, in units of pi/12, summing to pi
        assert sum(shape.angle_units) == 12
        for n, u in zip(triple, shape.angle_units):
            assert u * n == 24


def test_triangle_shape_refuses_non_base():
    with pytest.raises(ValueError):
        triangle_shape(DiskCondition(3, 12, 12))


# one face and a flat wheel ---------------------------------------------------


def wheel(k: int, margin: int = 1) -> TriComplex:
    """k faces around a center (type 0), rim alternating types 1/2."""
    assert k % 2 == 0
    types = [0] + [1 if i % 2 == 0 else 2 for i in range(k)]
    faces = [(0, 1 + i, 1 + (i + 1) % k) for i in range(k)]
    return TriComplex(DiskCondition(6, 6, 6), types, faces, boundary_margin=margin)


def test_face_type_validation():
    with pytest.raises(ValueError):
        TriComplex(DiskCondition(6, 6, 6), [0, 0, 1], [(0, 1, 2)], boundary_margin=0)


def test_star_link_adj():
    cx = wheel(6)
    st = cx.star(0)
    assert len(st.vertices) == 7 and len(st.faces) == 6 and len(st.edges) == 12
    lk = cx.link(0)
    assert lk.vertices == frozenset(range(1, 7))
    assert len(lk.edges) == 6 and not lk.faces
    sub = SimplicialSet.of({1, 2, 3}, [(1, 2), (2, 3)], ())
    adj = cx.adj(sub, 0)
    assert adj.vertices == {1, 2, 3} and adj.edges == {(1, 2), (2, 3)}
    # open star = star minus link
    op = cx.open_star(0)
    assert 0 in op.vertices and not (op.edges & lk.edges)


def test_link_condition_flat_wheel_tight():
    cx = wheel(6)
    res = check_link_condition(cx, 0)
    assert res.passed and res.girth_edges == 6 and res.girth_angle_units == 24


def test_link_condition_short_cycle_fails():
    cx = wheel(4)
    assert cx.is_interior(0)
    res = check_link_condition(cx, 0)
    assert not res.passed and res.girth_edges == 4
    assert res.girth_angle_units == 16  # 4 * 2pi/6 < 2pi


def test_link_condition_five_cycle_fails():
    # a 5-cycle cannot arise in a legally typed complex (link cycles alternate
    # edge types), so the mutation is applied at the link-graph level
    g = nx.MultiGraph()
    g.add_edges_from([(i, (i + 1) % 5, {"face": (0, i, (i + 1) % 5)}) for i in range(5)])
    lg = LinkGraph(0, 6, g)
    girth, _ = lg.girth_edges()
    assert girth == 5 and girth < lg.n_v  # 5 * 2pi/6 < 2pi: fails


def test_require_interior_raises_on_frontier():
    cx = wheel(6, margin=1)
    with pytest.raises(MarginError):
        cx.require_interior(1)  # rim vertex has single-face edges


def test_free_edges_and_validation():
    cx = wheel(6, margin=1)
    assert free_edge_violations(cx) == []
    rep = validate_complex(cx)
    assert rep.cat0_certified and rep.simply_connected and rep.connected
    bad = wheel(4, margin=1)
    rep2 = validate_complex(bad)
    assert not rep2.cat0_certified and rep2.link_failures == (0,)


def test_simply_connected_annulus_fails():
    # hexagon annulus: 6 faces around a missing center -> first homology
    types = [1 if i % 2 == 0 else 2 for i in range(6)] + [0] * 6
    faces = [(i, (i + 1) % 6, 6 + i) for i in range(6)]
    cx = TriComplex(DiskCondition(6, 6, 6), types, faces, boundary_margin=0)
    connected, chi, simply = is_simply_connected(cx)
    assert connected and chi == 0 and not simply


def test_json_round_trip():
    cx = wheel(6, margin=1)
    again = loads(dumps(cx))
    assert again.vertex_types == cx.vertex_types
    assert again.faces == cx.faces
    assert again.boundary_margin == cx.boundary_margin
    assert again.dc.triple == cx.dc.triple
    assert dumps(again) == dumps(cx)  # byte-stable


def test_edge_length_sq_by_opposite_type():
    cx = TriComplex(DiskCondition(4, 6, 12), [0, 1, 2], [(0, 1, 2)], boundary_margin=0)
    shape = triangle_shape(cx.dc)
    assert cx.edge_length_sq((1, 2)) == shape.side_sq[0]
    assert cx.edge_length_sq((0, 2)) == shape.side_sq[1]
    assert cx.edge_length_sq((0, 1)) == shape.side_sq[2]
