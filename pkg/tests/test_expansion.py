"""Expanding simplicial balls: epsilon, link trees, cones, certificates."""

import dataclasses
import math
from fractions import Fraction

import pytest

from cat0complex.balls import critical_radii, simplicial_ball
from cat0complex.exactnum import QField, RadicalSum
from cat0complex.expansion import (
    audit_boundary_lemmas,
    boundary_vertices,
    cone,
    epsilon_for,
    expand_to,
    link_tree,
    load_certificate,
    rs_from_json,
    rs_to_json,
    set_hash,
    store_certificate,
    tree_evidence,
    verify_certificate,
)
from cat0complex.generators import gen_regular, gen_seifert
from cat0complex.tricomplex import DiskCondition, MarginError, SimplicialSet

RS = RadicalSum.of_rational
SQRT = lambda n: RadicalSum.sqrt_of(QField.rational(n))  # noqa: E731
ALL3 = {(1, 2): 3, (1, 3): 3, (2, 3): 3}


@pytest.fixture(scope="module")
def cx666():
    return gen_seifert(DiskCondition(6, 6, 6), 4)


def test_epsilon_values(cx666):
    e1 = epsilon_for(cx666, 0, RS(1))
    assert math.isclose(float(e1), (1 - math.sqrt(3) / 2) / 2, rel_tol=1e-12)
    # exact: (1 - sqrt3/2) / 2
    expect = RS(Fraction(1, 2)) - SQRT(3).scale(Fraction(1, 4))
    assert (e1 - expect).is_zero()
    e2 = epsilon_for(cx666, 0, SQRT(3))
    assert math.isclose(float(e2), (math.sqrt(3) - math.sqrt(11) / 2) / 2, rel_tol=1e-12)


def test_epsilon_bounds_all_criticals():
    for triple in [(6, 6, 6), (4, 8, 8), (4, 6, 12)]:
        cx = gen_seifert(DiskCondition(*triple), 4)
        crits = critical_radii(cx, 0, RS(3))
        prev = RadicalSum.zero()
        for r in crits:
            eps = epsilon_for(cx, 0, r, prev)
            assert eps.sign() > 0
            # 0 < eps < r - sqrt(r^2 - 1/4), certified
            q = r.squared_if_single()
            bound = r - RadicalSum.sqrt_of(q - QField.rational(Fraction(1, 4)))
            assert (bound - eps).sign() > 0
            assert ((r - prev).scale(Fraction(1, 2)) - eps).sign() >= 0
            prev = r


def test_epsilon_refuses_below_one(cx666):
    with pytest.raises(ValueError):
        epsilon_for(cx666, 0, RS(Fraction(1, 2)))
    with pytest.raises(ValueError):
        epsilon_for(cx666, 0, RS(Fraction(5, 4)))  # not critical


def test_boundary_vertices(cx666):
    assert boundary_vertices(cx666, 0, RS(1)) == [1, 2, 3, 4, 5, 6]
    assert boundary_vertices(cx666, 0, SQRT(3)) == [7, 8, 9, 10, 11, 12]
    with pytest.raises(ValueError):
        boundary_vertices(cx666, 0, RS(Fraction(5, 4)))


def test_link_tree_cases(cx666):
    # single neighbour: one node, trivially a tree
    step = link_tree(cx666, 1, SimplicialSet.of({0}, (), ()))
    assert step.valid and step.diameter_units == 0
    assert step.gamma.vertices == frozenset({0})
    # full link of an interior vertex: a cycle, not acyclic
    full = link_tree(cx666, 0, cx666.full_set())
    assert full.connected and not full.acyclic and not full.valid


def test_link_tree_diameter_limit(cx666):
    # the paper bound: diameter <= n_x / 2 link edges (angle pi)
    x = 1
    assert cx666.n_of(x) == 6
    lk = cx666.link(x)
    import networkx as nx

    g = nx.Graph()
    g.add_edges_from(lk.edges)
    # a path of 4 link edges exceeds pi at an n=6 vertex
    path = []
    for comp in [g.subgraph(c) for c in nx.connected_components(g)]:
        nodes = list(comp.nodes)
        for a in nodes:
            for b in nodes:
                p = nx.shortest_path(comp, a, b)
                if len(p) >= 5:
                    path = p
                    break
    if path:
        sub = SimplicialSet.of(path, list(zip(path, path[1:])), ())
        ev = tree_evidence(cx666, x, sub)
        assert ev.connected and ev.acyclic and not ev.diameter_ok


def test_cone_examples(cx666):
    lk = cx666.link(0)
    # full link -> star
    st = cone(cx666, 0, SimplicialSet.of(lk.vertices, lk.edges, ()))
    assert st == cx666.star(0)
    # one link edge -> one face
    e = sorted(lk.edges)[0]
    c1 = cone(cx666, 0, SimplicialSet.of(set(e), [e], ()))
    assert len(c1.faces) == 1 and len(c1.edges) == 3
    with pytest.raises(ValueError):
        cone(cx666, 0, SimplicialSet.of({99}, (), ()))


def test_expand_roundtrip_and_hexagon(cx666):
    cert = expand_to(cx666, 0, RS(1))
    assert len(cert.stages) == 1 and len(cert.stages[0].steps) == 6
    final = simplicial_ball(cx666, 0, RS(1))
    assert cert.stages[0].final_hash == set_hash(final)
    assert (len(final.vertices), len(final.edges), len(final.faces)) == (7, 12, 6)
    assert verify_certificate(cx666, cert).valid


def test_expand_488_sqrt2():
    cx = gen_seifert(DiskCondition(4, 8, 8), 4)
    cert = expand_to(cx, 0, SQRT(2))
    assert len(cert.stages) == 2
    assert (cert.stages[1].radius - SQRT(2)).is_zero()
    assert verify_certificate(cx, cert).valid


def test_expand_below_one_empty(cx666):
    cert = expand_to(cx666, 0, RS(Fraction(1, 2)))
    assert cert.stages == ()
    assert verify_certificate(cx666, cert).valid


def test_expand_margin_guard(cx666):
    with pytest.raises(MarginError):
        expand_to(cx666, 0, RS(4))


def test_expand_regular_order3():
    cx = gen_regular(DiskCondition(6, 6, 6), ALL3, 3)
    cert = expand_to(cx, 0, RS(2))
    assert verify_certificate(cx, cert).valid
    for st in cert.stages:
        for s in st.steps:
            assert s.valid


def test_order_independence(cx666):
    base = expand_to(cx666, 0, SQRT(3))
    hashes = {base.stages[-1].final_hash}
    for seed in range(6):
        c = expand_to(cx666, 0, SQRT(3), shuffle_seed=seed)
        assert verify_certificate(cx666, c).valid
        hashes.add(c.stages[-1].final_hash)
    assert len(hashes) == 1


def test_boundary_vertex_degree_one_property(cx666):
    # a sphere vertex appearing in another's link tree has degree 1 there
    cert = expand_to(cx666, 0, RS(2))
    for st in cert.stages:
        vr = {s.x for s in st.steps}
        for s in st.steps:
            import networkx as nx

            g = nx.Graph()
            g.add_nodes_from(s.gamma.vertices)
            g.add_edges_from(s.gamma.edges)
            for w in s.gamma.vertices & vr:
                assert g.degree(w) == 1, (s.x, w)


def test_certificate_file_roundtrip(tmp_path, cx666):
    cert = expand_to(cx666, 0, SQRT(3))
    p = tmp_path / "cert.json"
    store_certificate(cert, p)
    again = load_certificate(p)
    assert again == cert
    assert verify_certificate(cx666, again).valid


def test_radical_json_roundtrip():
    x = SQRT(3).scale(Fraction(2, 7)) + RS(Fraction(-1, 3))
    assert rs_from_json(rs_to_json(x)) == x


MUTATION_WITNESSES = {
    "gamma-edge-deleted": "not connected",
    "epsilon-inflated": "epsilon bound",
    "vertex-dropped": "V_r mismatch",
    "hash-altered": "hash mismatch",
}


def _mutations(cert):
    # delete a gamma edge from a step with >= 2 edges
    for ki, st in enumerate(cert.stages):
        for si, s in enumerate(st.steps):
            if len(s.gamma.edges) >= 2:
                g2 = SimplicialSet.of(s.gamma.vertices, sorted(s.gamma.edges)[1:], ())
                s2 = dataclasses.replace(s, gamma=g2)
                steps = st.steps[:si] + (s2,) + st.steps[si + 1:]
                st2 = dataclasses.replace(st, steps=steps)
                yield "gamma-edge-deleted", dataclasses.replace(
                    cert, stages=cert.stages[:ki] + (st2,) + cert.stages[ki + 1:]
                )
                break
        else:
            continue
        break
    st = cert.stages[0]
    yield "epsilon-inflated", dataclasses.replace(
        cert,
        stages=(dataclasses.replace(st, epsilon=RS(Fraction(1, 2))),) + cert.stages[1:],
    )
    yield "vertex-dropped", dataclasses.replace(
        cert,
        stages=(dataclasses.replace(st, steps=st.steps[:-1]),) + cert.stages[1:],
    )
    last = cert.stages[-1]
    yield "hash-altered", dataclasses.replace(
        cert,
        stages=cert.stages[:-1] + (dataclasses.replace(last, final_hash="0" * 64),),
    )


def test_mutation_kill_rate(cx666):
    cert = expand_to(cx666, 0, RS(2))
    assert verify_certificate(cx666, cert).valid
    killed = 0
    total = 0
    for name, mutant in _mutations(cert):
        total += 1
        res = verify_certificate(cx666, mutant)
        assert not res.valid, name
        assert MUTATION_WITNESSES[name] in res.witness, (name, res.witness)
        killed += 1
    assert killed == total == len(MUTATION_WITNESSES)


def test_boundary_lemma_audit_clean(cx666):
    for r in critical_radii(cx666, 0, RS(2)):
        rep = audit_boundary_lemmas(cx666, 0, r)
        assert rep.clean, (float(r), rep)


def test_boundary_lemma_audit_regular_order3():
    cx = gen_regular(DiskCondition(6, 6, 6), ALL3, 3)
    rep = audit_boundary_lemmas(cx, 0, RS(1))
    assert rep.clean
