"""Metric balls, level spheres, critical radii and face classification.

The level sphere of radius r around a vertex meets each flat triangle in at
most two circular-ish arcs; which pattern occurs is decided purely from exact
vertex distances and exact minimum distances from the centre to each edge.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from . import planar
from .exactnum import QField, RadicalSum
from .geodesics import (
    GeodesicResult,
    _bound_to_sq,
    _min_dist_sq_float,
    distances_from,
    min_dist_sq_on_edge_in_wedge,
    sweep,
)
from .planar import Pt
from .tricomplex import (
    Edge,
    Face,
    MarginError,
    SimplicialSet,
    TriComplex,
    edge_key,
)

__all__ = [
    "FaceIntersectionType",
    "BallView",
    "VertexPartition",
    "EdgeMin",
    "CriticalRadiusError",
    "vertices_within",
    "critical_radii",
    "simplicial_ball",
    "classify_face",
    "edge_min_distances",
    "audit_sphere_lemmas",
    "SphereAuditReport",
    "ball_view",
]


class FaceIntersectionType(enum.Enum):
    Empty = "empty"
    Full = "full"
    Type1 = "type1"  # one arc cutting the corner at an inside vertex
    Type2 = "type2"  # one arc separating one full edge from an outside corner
    Type3 = "type3"  # one arc with both endpoints on a single edge
    Type4 = "type4"  # two arcs


class CriticalRadiusError(ValueError):
    """Raised when a transversal-only operation meets a critical radius."""


def boundary_margin_guard(cx: TriComplex, v: int, r: RadicalSum) -> None:
    """Balls of radius r at v are faithful only when r + 1 fits inside the
    truncation margin; refuse anything larger (margin-0 complexes refuse all
    metric queries)."""
    if v not in cx.depth:
        raise MarginError(f"vertex {v} not in the complex")
    room = cx.boundary_margin - cx.depth[v]
    if float(r) + 1 > room:
        raise MarginError(
            f"radius {float(r):.4f} + 1 exceeds margin room {room} at {v}"
        )


def _ball_bound(r: RadicalSum) -> RadicalSum:
    """Search horizon: slightly beyond r so on-set distances are certified."""
    return r + RadicalSum.of_rational(Fraction(1, 2))


@dataclass(frozen=True)
class VertexPartition:
    center: int
    radius: RadicalSum
    inside: tuple[int, ...]
    on: tuple[int, ...]
    outside: tuple[int, ...]
    distances: dict[int, GeodesicResult]


def vertices_within(cx: TriComplex, v: int, r: RadicalSum) -> VertexPartition:
    """Exact in / on / out partition of the vertex set for B_{r,v}."""
    boundary_margin_guard(cx, v, r)
    dists = distances_from(cx, v, _ball_bound(r))
    inside, on = [], []
    for w, res in dists.items():
        s = (res.length - r).sign()
        if s < 0:
            inside.append(w)
        elif s == 0:
            on.append(w)
    known = set(inside) | set(on)
    outside = [w for w in range(cx.num_vertices()) if w not in known]
    return VertexPartition(
        v, r, tuple(sorted(inside)), tuple(sorted(on)), tuple(outside), dists
    )


def is_critical(cx: TriComplex, v: int, r: RadicalSum) -> bool:
    return bool(vertices_within(cx, v, r).on)


def critical_radii(cx: TriComplex, v: int, R: RadicalSum) -> list[RadicalSum]:
    """Strictly increasing vertex distances <= R from v (the critical radii).

    Discreteness witness: consecutive values are separated by refining their
    certified intervals until disjoint; RadicalSum comparison does exactly
    that, so the returned order is itself the certificate.
    """
    boundary_margin_guard(cx, v, R)
    dists = distances_from(cx, v, R)
    seen: list[RadicalSum] = []
    for w, res in dists.items():
        if w == v or (res.length - R).sign() > 0:
            continue
        if not any((res.length - got).is_zero() for got in seen):
            seen.append(res.length)
    return sorted(seen)


def simplicial_ball(cx: TriComplex, v: int, r: RadicalSum) -> SimplicialSet:
    """Full subcomplex on the vertices at distance <= r (the maximal
    simplicial subset of the metric ball, by convexity)."""
    part = vertices_within(cx, v, r)
    inset = set(part.inside) | set(part.on)
    edges = [e for e in cx.edges if e[0] in inset and e[1] in inset]
    faces = [f for f in cx.faces if all(w in inset for w in f)]
    return SimplicialSet.of(inset, edges, faces)


# exact minimum distance from the centre to every edge ------------------------


@dataclass(frozen=True)
class EdgeMin:
    """Minimum distance from a centre vertex to (any point of) an edge.

    params lists the distinct positions along the edge attaining the minimum,
    as exact parameters t in [0, 1] from the smaller-id endpoint.
    """

    edge: Edge
    value: RadicalSum
    params: tuple[QField, ...]


def _edge_param(pa: Pt, pb: Pt, pt: Pt) -> QField:
    vv = planar.sub(pb, pa)
    return planar.dot(planar.sub(pt, pa), vv) / planar.norm_sq(vv)


def _argmin_on_edge_in_wedge(
    wedge: tuple[Pt, Pt], pa: Pt, pb: Pt
) -> Optional[tuple[QField, QField]]:
    """(squared distance, edge parameter) of the closest wedge-visible point
    of segment [pa, pb] to the origin."""
    md = min_dist_sq_on_edge_in_wedge(wedge, pa, pb)
    if md is None:
        return None
    # recover the argmin: test the same candidates for attaining md
    a, b = wedge
    cands: list[Pt] = []
    for pt in (pa, pb):
        if planar.cross_sign(a, pt) >= 0 and planar.cross_sign(pt, b) >= 0:
            cands.append(pt)
    vv = planar.sub(pb, pa)
    for ray in (a, b):
        denom = planar.cross(ray, vv)
        if denom.sign() == 0:
            continue
        t = planar.cross(pa, ray) / denom
        if t.sign() >= 0 and (QField.rational(1) - t).sign() >= 0:
            hit = planar.add(pa, planar.scale(vv, t))
            if planar.dot(hit, ray).sign() >= 0:
                cands.append(hit)
    t = planar.dot(planar.scale(pa, QField.rational(-1)), vv) / planar.norm_sq(vv)
    if t.sign() >= 0 and (QField.rational(1) - t).sign() >= 0:
        foot = planar.add(pa, planar.scale(vv, t))
        if planar.cross_sign(a, foot) >= 0 and planar.cross_sign(foot, b) >= 0:
            cands.append(foot)
    for pt in cands:
        if (planar.norm_sq(pt) - md).sign() == 0:
            return md, _edge_param(pa, pb, pt)
    return None


def edge_min_distances(
    cx: TriComplex, v: int, horizon: RadicalSum
) -> dict[Edge, EdgeMin]:
    """Exact min distance from v to each edge within the horizon, with the
    attaining positions (virtual-source minimisation over all corridors)."""
    cache = getattr(cx, "_edge_min_cache", None)
    if cache is None:
        cache = cx._edge_min_cache = {}
    hit = cache.get(v)
    if hit is not None and (hit[0] - horizon).sign() >= 0:
        return hit[1]

    dists = distances_from(cx, v, horizon)
    # collect candidates: (value, t) per edge, with a float champion filter
    best_f: dict[Edge, float] = {}
    cands: dict[Edge, list[tuple[RadicalSum, QField]]] = {}

    def consider(e: Edge, value: RadicalSum, t: QField) -> None:
        fv = float(value)
        cur = best_f.get(e)
        if cur is not None and fv > cur + 1e-9:
            return
        if cur is None or fv < cur:
            best_f[e] = fv
        cands.setdefault(e, []).append((value, t))

    for w, res in dists.items():
        base = res.length
        rem = horizon - base
        if rem.sign() < 0:
            continue
        # endpoint candidates
        for e in cx.vertex_edges[w]:
            t_end = QField.rational(0 if e[0] == w else 1)
            consider(e, base, t_end)
        swp = sweep(cx, w, _bound_to_sq(rem))
        rem_f = float(rem) + 1e-9
        for st in swp.states:
            f = st.faces[-1]
            fa, fb, fc = f
            for e in (edge_key(fa, fb), edge_key(fa, fc), edge_key(fb, fc)):
                if w in e:
                    continue  # covered by the endpoint/zero candidates at w
                pa, pb = st.chart[e[0]], st.chart[e[1]]
                mdf = _min_dist_sq_float(st.wedge, pa, pb)
                if mdf ** 0.5 > rem_f or (
                    e in best_f and mdf ** 0.5 + float(base) > best_f[e] + 1e-9
                ):
                    continue
                got = _argmin_on_edge_in_wedge(st.wedge, pa, pb)
                if got is None:
                    continue
                md, t = got
                consider(e, base + RadicalSum.sqrt_of(md), t)

    out: dict[Edge, EdgeMin] = {}
    for e, lst in cands.items():
        best = lst[0][0]
        for val, _ in lst[1:]:
            if val < best:
                best = val
        params: list[QField] = []
        for val, t in lst:
            if (val - best).is_zero() and all((t - s).sign() != 0 for s in params):
                params.append(t)
        out[e] = EdgeMin(e, best, tuple(params))
    cache[v] = (horizon, out)
    return out


# face classification ---------------------------------------------------------


def _edge_crossings(
    status: dict[int, bool], e: Edge, em: Optional[EdgeMin], r: RadicalSum
) -> int:
    sa, sb = status[e[0]], status[e[1]]
    if sa and sb:
        return 0
    if sa != sb:
        return 1
    if em is None:
        return 0
    # both endpoints outside: the convex distance function along the edge
    # dips below r iff the edge minimum does (tangency counts as no crossing)
    return 2 if (em.value - r).sign() < 0 else 0


@dataclass(frozen=True)
class FaceIntersection:
    face: Face
    kind: FaceIntersectionType
    crossings: dict[Edge, int]
    # arcs as pairs of host edges, in boundary order
    arcs: tuple[tuple[Edge, Edge], ...]


def _face_intersection(
    cx: TriComplex,
    status: dict[int, bool],
    ems: dict[Edge, EdgeMin],
    r: RadicalSum,
    f: Face,
) -> FaceIntersection:
    w0, w1, w2 = f
    edges = [edge_key(w0, w1), edge_key(w1, w2), edge_key(w2, w0)]
    crossings = {
        e: _edge_crossings(status, e, ems.get(e), r) for e in edges
    }
    k = sum(1 for w in f if status[w])
    total = sum(crossings.values())
    if total == 0:
        kind = FaceIntersectionType.Full if k == 3 else FaceIntersectionType.Empty
        return FaceIntersection(f, kind, crossings, ())
    # walk the boundary w0 -> w1 -> w2 -> w0; status flips at each crossing
    order: list[Edge] = []  # host edge of each crossing, in boundary order
    for e in edges:
        order.extend([e] * crossings[e])
    # arcs join consecutive crossings that bound an outside boundary stretch
    arcs: list[tuple[Edge, Edge]] = []
    after: list[bool] = []  # True: the stretch after crossing i is inside
    st = status[w0]
    for _ in order:
        st = not st
        after.append(st)
    n = len(order)
    for i in range(n):
        if not after[i]:
            arcs.append((order[i], order[(i + 1) % n]))
    if len(arcs) == 1:
        e1, e2 = arcs[0]
        if e1 == e2:
            kind = FaceIntersectionType.Type3
        elif k == 1:
            kind = FaceIntersectionType.Type1
        else:
            kind = FaceIntersectionType.Type2
    elif len(arcs) == 2:
        kind = FaceIntersectionType.Type4
    else:
        raise CriticalRadiusError(
            f"face {f}: {len(arcs)} sphere arcs (possible lemma violation)"
        )
    return FaceIntersection(f, kind, crossings, tuple(arcs))


def _status_and_mins(
    cx: TriComplex, v: int, r: RadicalSum
) -> tuple[dict[int, bool], dict[Edge, EdgeMin]]:
    part = vertices_within(cx, v, r)
    if part.on:
        raise CriticalRadiusError(
            f"radius is critical at {v}: vertices {part.on} lie on the sphere"
        )
    status = {w: False for w in range(cx.num_vertices())}
    for w in part.inside:
        status[w] = True
    ems = edge_min_distances(cx, v, _ball_bound(r))
    return status, ems


def classify_face(
    cx: TriComplex, v: int, r: RadicalSum, f: Face
) -> FaceIntersectionType:
    """Intersection pattern of the level sphere S_{r,v} with face f, for
    regular (non-critical) r."""
    status, ems = _status_and_mins(cx, v, r)
    return _face_intersection(cx, status, ems, r, f).kind


@dataclass(frozen=True)
class BallView:
    center: int
    radius: RadicalSum
    vertex_distances: dict[int, GeodesicResult]
    edge_crossings: dict[Edge, int]
    face_types: dict[Face, FaceIntersectionType]


def ball_view(cx: TriComplex, v: int, r: RadicalSum) -> BallView:
    status, ems = _status_and_mins(cx, v, r)
    part = vertices_within(cx, v, r)
    crossings: dict[Edge, int] = {}
    face_types: dict[Face, FaceIntersectionType] = {}
    for f in cx.faces:
        fi = _face_intersection(cx, status, ems, r, f)
        face_types[f] = fi.kind
        crossings.update(fi.crossings)
    return BallView(v, r, part.distances, crossings, face_types)


# sphere-lemma audit ----------------------------------------------------------


@dataclass(frozen=True)
class SphereAuditReport:
    center: int
    radius: RadicalSum
    faces_met: int
    component_violations: tuple[Face, ...]
    same_pair_violations: tuple[Face, ...]
    closest_point_violations: tuple[Edge, ...]

    @property
    def clean(self) -> bool:
        return not (
            self.component_violations
            or self.same_pair_violations
            or self.closest_point_violations
        )


def audit_sphere_lemmas(cx: TriComplex, v: int, r: RadicalSum) -> SphereAuditReport:
    """Checks, for every face met by S_{r,v}: at most two arc components; no
    two arcs joining the same pair of edges; and for every edge, a unique
    closest point to the centre."""
    status, ems = _status_and_mins(cx, v, r)
    comp_bad: list[Face] = []
    pair_bad: list[Face] = []
    met = 0
    for f in cx.faces:
        try:
            fi = _face_intersection(cx, status, ems, r, f)
        except CriticalRadiusError:
            comp_bad.append(f)
            continue
        if fi.arcs:
            met += 1
        if len(fi.arcs) == 2:
            pairs = [tuple(sorted(a)) for a in fi.arcs]
            if pairs[0] == pairs[1]:
                pair_bad.append(f)
    closest_bad = [
        e for e, em in ems.items() if len(em.params) != 1
    ]
    return SphereAuditReport(
        v, r, met, tuple(comp_bad), tuple(pair_bad), tuple(sorted(closest_bad))
    )
