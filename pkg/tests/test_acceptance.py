"""Acceptance gate: ten timed criteria, one pass/fail line each.

The status lines are collected by the conftest terminal-summary hook so they
always appear at the end of the pytest log, outside output capture.
"""

import contextlib
import dataclasses
import itertools
import time
from fractions import Fraction

import pytest

from cat0complex import planar
from cat0complex.balls import audit_sphere_lemmas, critical_radii, simplicial_ball, vertices_within
from cat0complex.exactnum import QField, RadicalSum
from cat0complex.expansion import (
    _lt_paper_bound,
    epsilon_for,
    expand_to,
    set_hash,
    verify_certificate,
)
from cat0complex.generators import gen_regular, gen_seifert
from cat0complex.geodesics import distances_from
from cat0complex.tricomplex import (
    DiskCondition,
    LinkGraph,
    SimplicialSet,
    TriComplex,
    check_link_condition,
    triangle_shape,
    validate_complex,
    validate_disk_condition,
)

RS = RadicalSum.of_rational
SQRT = lambda n: RadicalSum.sqrt_of(QField.rational(n))  # noqa: E731
FAMILIES = [(6, 6, 6), (4, 8, 8), (4, 6, 12)]
ALL3 = {(1, 2): 3, (1, 3): 3, (2, 3): 3}


def _say(line: str) -> None:
    import conftest

    print(line)
    conftest.ACCEPTANCE_LINES.append(line)


@contextlib.contextmanager
def criterion(num: int, desc: str, budget: float):
    t0 = time.perf_counter()
    try:
        yield
    except BaseException:
        _say(f"criterion {num:2d} [{desc}]: FAIL ({time.perf_counter() - t0:.1f}s / {budget:.0f}s)")
        raise
    elapsed = time.perf_counter() - t0
    ok = elapsed <= budget
    _say(
        f"criterion {num:2d} [{desc}]: {'PASS' if ok else 'FAIL (over budget)'} "
        f"({elapsed:.1f}s / {budget:.0f}s)"
    )
    assert ok, f"criterion {num} exceeded its {budget:.0f}s budget ({elapsed:.1f}s)"


@pytest.fixture(scope="module")
def deep():
    return {t: gen_seifert(DiskCondition(*t), 4) for t in FAMILIES}


def test_criterion_01_disk_condition_gate():
    with criterion(1, "disk-condition gate, all triples <= 16", 1.0):
        base = {tuple(sorted(t)) for t in FAMILIES}
        for t in itertools.product(range(1, 17), repeat=3):
            res = validate_disk_condition(DiskCondition(*t))
            expect = sum(Fraction(1, n) for n in t) <= Fraction(1, 2)
            assert res.accepted == expect, t
            assert (res.code == "base") == (tuple(sorted(t)) in base), t


def test_criterion_02_shape_squares():
    with criterion(2, "exact side squares and angles per family", 1.0):
        expected = {
            (6, 6, 6): {1},
            (4, 8, 8): {1, 2},
            (4, 6, 12): {1, 3, 4},
        }
        for triple, squares in expected.items():
            shape = triangle_shape(DiskCondition(*triple))
            assert {QField.rational(s) for s in squares} == set(shape.side_sq)
            assert sum(shape.angle_units) == 12
            for n, u in zip(triple, shape.angle_units):
                assert u * n == 24


def test_criterion_03_link_condition(deep):
    with criterion(3, "link condition tight; short cycles rejected", 5.0):
        for cx in deep.values():
            checked = 0
            for v in range(cx.num_vertices()):
                if cx.is_interior(v):
                    res = check_link_condition(cx, v)
                    assert res.passed and res.girth_angle_units == 24
                    checked += 1
            assert checked > 0
        # 4-wheel fails the certificate outright
        bad = TriComplex(
            DiskCondition(6, 6, 6),
            [0, 1, 2, 1, 2],
            [(0, 1, 2), (0, 2, 3), (0, 3, 4), (0, 4, 1)],
            boundary_margin=1,
        )
        rep = validate_complex(bad)
        assert not rep.cat0_certified and rep.link_failures == (0,)
        # a mutated 5-cycle link (illegal typing, injected at graph level)
        import networkx as nx

        g = nx.MultiGraph()
        g.add_edges_from(
            [(i, (i + 1) % 5, {"face": (0, i, (i + 1) % 5)}) for i in range(5)]
        )
        girth, _ = LinkGraph(0, 6, g).girth_edges()
        assert girth == 5 < 6


def _eisenstein_pair(pt):
    q2 = 2 * pt[1].c
    p2 = pt[0].a - q2 / 2
    assert q2.denominator == 1 and p2.denominator == 1
    return int(p2), int(q2)


def test_criterion_04_distances_eisenstein():
    with criterion(4, "(6,6,6) distances vs lattice-norm oracle + criticals", 60.0):
        cx = gen_seifert(DiskCondition(6, 6, 6), 5)
        pairs = 0
        for s in range(cx.num_vertices()):
            if cx.depth[s] > 1:
                continue
            res = distances_from(cx, s, RS(4 - cx.depth[s]))
            p1, q1 = _eisenstein_pair(cx.planar_coords[s])
            for t, r in res.items():
                p2, q2 = _eisenstein_pair(cx.planar_coords[t])
                a, b = p2 - p1, q2 - q1
                m = a * a + a * b + b * b
                assert (r.length - RadicalSum.sqrt_of(QField.rational(m))).is_zero(), (s, t)
                pairs += 1
        assert pairs > 200
        got = critical_radii(cx, 0, RS(4))
        expect = [RS(1), SQRT(3), RS(2), SQRT(7), RS(3), SQRT(12), SQRT(13), RS(4)]
        assert len(got) == len(expect)
        for g, e in zip(got, expect):
            assert (g - e).is_zero()


@pytest.mark.parametrize("triple", [(4, 8, 8), (4, 6, 12)])
def test_criterion_05_distances_developing_map(triple, deep):
    with criterion(5, f"{triple} distances vs developing-map oracle", 60.0):
        cx = deep[triple]
        res = distances_from(cx, 0, RS(3))
        assert len(res) >= 15
        for t, r in res.items():
            oracle_sq = planar.norm_sq(
                planar.sub(cx.planar_coords[t], cx.planar_coords[0])
            )
            assert (r.length - RadicalSum.sqrt_of(oracle_sq)).is_zero(), (triple, t)


def test_criterion_06_sphere_audits(deep):
    with criterion(6, "sphere lemma audits at >= 20 regular radii per family", 120.0):
        for triple, cx in deep.items():
            crits = critical_radii(cx, 0, RS(3))
            radii = []
            prev = RadicalSum.zero()
            for nxt in crits:
                gap = nxt - prev
                radii.extend(prev + gap.scale(Fraction(k, 7)) for k in range(1, 7))
                prev = nxt
            assert len(radii) >= 20, triple
            for r in radii:
                rep = audit_sphere_lemmas(cx, 0, r)
                assert rep.clean, (triple, float(r), rep)


def test_criterion_07_expansion_roundtrips(deep):
    with criterion(7, "expansion certificates verify on all families", 120.0):
        for cx in deep.values():
            cert = expand_to(cx, 0, RS(3))
            assert cert.stages
            assert verify_certificate(cx, cert).valid
            assert cert.stages[-1].final_hash == set_hash(simplicial_ball(cx, 0, RS(3)))
        cxr = gen_regular(DiskCondition(6, 6, 6), ALL3, 3)
        certr = expand_to(cxr, 0, RS(2))
        assert verify_certificate(cxr, certr).valid


def test_criterion_08_mutation_kill(deep):
    with criterion(8, "all certificate mutations rejected", 30.0):
        cx = deep[(6, 6, 6)]
        cert = expand_to(cx, 0, RS(2))
        assert verify_certificate(cx, cert).valid
        mutants = []
        # drop a gamma edge from a step that has at least two
        for ki, st in enumerate(cert.stages):
            for si, s in enumerate(st.steps):
                if len(s.gamma.edges) >= 2:
                    g2 = SimplicialSet.of(s.gamma.vertices, sorted(s.gamma.edges)[1:], ())
                    steps = st.steps[:si] + (dataclasses.replace(s, gamma=g2),) + st.steps[si + 1:]
                    mutants.append(
                        dataclasses.replace(
                            cert,
                            stages=cert.stages[:ki]
                            + (dataclasses.replace(st, steps=steps),)
                            + cert.stages[ki + 1:],
                        )
                    )
                    break
            if mutants:
                break
        st0, last = cert.stages[0], cert.stages[-1]
        mutants += [
            dataclasses.replace(
                cert, stages=(dataclasses.replace(st0, epsilon=RS(Fraction(1, 2))),) + cert.stages[1:]
            ),
            dataclasses.replace(
                cert, stages=(dataclasses.replace(st0, epsilon=RS(-1)),) + cert.stages[1:]
            ),
            dataclasses.replace(
                cert, stages=(dataclasses.replace(st0, steps=st0.steps[:-1]),) + cert.stages[1:]
            ),
            dataclasses.replace(
                cert,
                stages=(dataclasses.replace(st0, steps=st0.steps + (st0.steps[0],)),)
                + cert.stages[1:],
            ),
            dataclasses.replace(
                cert, stages=(dataclasses.replace(st0, radius=RS(Fraction(5, 4))),) + cert.stages[1:]
            ),
            dataclasses.replace(
                cert,
                stages=cert.stages[:-1] + (dataclasses.replace(last, final_hash="0" * 64),),
            ),
        ]
        # forge the diameter on a step that genuinely has one
        for ki, st in enumerate(cert.stages):
            for si, s in enumerate(st.steps):
                if (s.diameter_units or 0) >= 1:
                    forged = dataclasses.replace(s, diameter_units=0)
                    steps = st.steps[:si] + (forged,) + st.steps[si + 1:]
                    mutants.append(
                        dataclasses.replace(
                            cert,
                            stages=cert.stages[:ki]
                            + (dataclasses.replace(st, steps=steps),)
                            + cert.stages[ki + 1:],
                        )
                    )
                    break
            else:
                continue
            break
        assert len(mutants) == 8
        killed = sum(1 for m in mutants if not verify_certificate(cx, m).valid)
        assert killed == len(mutants), f"only {killed}/{len(mutants)} mutants rejected"


def test_criterion_09_order_independence(deep):
    with criterion(9, "expansion outcome independent of 20 step orders", 30.0):
        cx = deep[(6, 6, 6)]
        hashes = set()
        for seed in range(20):
            cert = expand_to(cx, 0, SQRT(3), shuffle_seed=seed)
            assert verify_certificate(cx, cert).valid
            hashes.add(cert.stages[-1].final_hash)
        assert len(hashes) == 1


def test_criterion_10_epsilon_conformance():
    with criterion(10, "epsilon bounds and ball containment at every critical", 30.0):
        for triple in FAMILIES:
            cx = gen_seifert(DiskCondition(*triple), 5)
            crits = critical_radii(cx, 0, RS(4))
            prev = RadicalSum.zero()
            for r in crits:
                eps = epsilon_for(cx, 0, r, prev)
                assert eps.sign() > 0
                assert _lt_paper_bound(eps, r) is True
                assert ((r - prev).scale(Fraction(1, 2)) - eps).sign() >= 0
                part = vertices_within(cx, 0, r)
                shrunk = simplicial_ball(cx, 0, r - eps)
                assert set(part.inside) == set(shrunk.vertices), (triple, float(r))
                prev = r
