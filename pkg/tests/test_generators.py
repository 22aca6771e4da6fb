"""Generated complexes: tessellation truncations and tree-like developments."""

from fractions import Fraction

import pytest

from cat0complex import planar
from cat0complex.exactnum import QField
from cat0complex.generators import (
    GenSpec,
    canonical_face_points,
    gen_regular,
    gen_seifert,
)
from cat0complex.tricomplex import (
    DiskCondition,
    check_link_condition,
    loads,
    dumps,
    validate_complex,
)

ALL3 = {(1, 2): 3, (1, 3): 3, (2, 3): 3}


def test_canonical_face_points_4612():
    p1, p2, p3 = canonical_face_points(DiskCondition(4, 6, 12))
    assert p3 == planar.ORIGIN
    assert p2 == (QField.rational(2), QField.rational(0))
    assert p1 == (QField.rational(Fraction(3, 2)), QField(0, 0, Fraction(1, 2), 0))


def test_seifert_radius_zero_and_one():
    cx0 = gen_seifert(DiskCondition(6, 6, 6), 0)
    assert cx0.num_vertices() == 1 and not cx0.faces
    cx1 = gen_seifert(DiskCondition(6, 6, 6), 1)
    assert cx1.num_vertices() == 7
    assert len(cx1.faces) == 6
    assert len(cx1.edges) == 12


def test_seifert_counts_grow_and_validate():
    for triple in [(6, 6, 6), (4, 8, 8), (4, 6, 12)]:
        prev = 0
        for radius in (1, 2, 3):
            cx = gen_seifert(DiskCondition(*triple), radius)
            assert cx.num_vertices() > prev
            prev = cx.num_vertices()
            rep = validate_complex(cx)
            assert rep.cat0_certified, (triple, radius, rep)


def test_seifert_interior_links_tight():
    cx = gen_seifert(DiskCondition(4, 8, 8), 3)
    checked = 0
    for v in range(cx.num_vertices()):
        if cx.is_interior(v):
            res = check_link_condition(cx, v)
            assert res.passed and res.girth_angle_units == 24
            checked += 1
    assert checked > 0


def test_seifert_deterministic_and_round_trip():
    a = gen_seifert(DiskCondition(4, 6, 12), 2)
    b = gen_seifert(DiskCondition(4, 6, 12), 2)
    assert dumps(a) == dumps(b)
    again = loads(dumps(a))
    assert again.faces == a.faces and again.vertex_types == a.vertex_types


def test_seifert_base_vertex_is_type1():
    for triple in [(6, 6, 6), (4, 8, 8), (4, 6, 12)]:
        cx = gen_seifert(DiskCondition(*triple), 2)
        assert cx.n_of(0) == triple[0]
        assert cx.depth[0] == 0


def test_gen_regular_counts_and_edge_orders():
    cx = gen_regular(DiskCondition(6, 6, 6), ALL3, 2)
    assert cx.num_vertices() == 33
    counts = {len(fs) for fs in cx.edge_faces.values()}
    assert counts == {1, 3}
    rep = validate_complex(cx, ALL3)
    assert rep.cat0_certified, rep


def test_gen_regular_all_two_is_seifert():
    flat = {(1, 2): 2, (1, 3): 2, (2, 3): 2}
    a = gen_regular(DiskCondition(6, 6, 6), flat, 2)
    b = gen_seifert(DiskCondition(6, 6, 6), 2)
    assert dumps(a) == dumps(b)


def test_gen_regular_mixed_orders():
    orders = {(1, 2): 3, (1, 3): 2, (2, 3): 2}
    cx = gen_regular(DiskCondition(4, 8, 8), orders, 2)
    for e, fs in cx.edge_faces.items():
        t1, t2 = cx.vertex_types[e[0]], cx.vertex_types[e[1]]
        want = orders[tuple(sorted((t1 + 1, t2 + 1)))]
        assert len(fs) in (1, want), (e, len(fs))


def test_genspec_validation_errors():
    dc = DiskCondition(6, 6, 6)
    with pytest.raises(ValueError):
        GenSpec(dc, -1).validate()
    with pytest.raises(ValueError):
        GenSpec(DiskCondition(5, 5, 5), 2).validate()  # not base
    with pytest.raises(ValueError):
        GenSpec(dc, 2, "regular", {(1, 2): 1, (1, 3): 2, (2, 3): 2}).validate()
    with pytest.raises(ValueError, match="angle"):
        GenSpec(dc, 2, "seifert", None, {1: 5}).validate()  # closes too early
    with pytest.raises(ValueError):
        GenSpec(dc, 2, "seifert", None, {1: 7}).validate()  # over-closure
    GenSpec(dc, 2, "seifert", None, {1: 6}).validate()  # flat closure is fine


def test_planar_coords_are_an_isometry_witness():
    cx = gen_seifert(DiskCondition(4, 8, 8), 2)
    for e in cx.edges:
        d = planar.dist_sq(cx.planar_coords[e[0]], cx.planar_coords[e[1]])
        assert d == cx.edge_length_sq(e)
