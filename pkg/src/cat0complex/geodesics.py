"""Exact geodesic distances and angles via corridor unfolding into E².

Every face is a Euclidean triangle whose vertex angles are multiples of
pi/12, so unfolded charts live in Q(sqrt2, sqrt3)² and all visibility
predicates reduce to exact sign computations.  Shortest paths between
vertices decompose into straight segments between vertices, found by a
visibility-fan sweep over non-backtracking face corridors, then combined by
Dijkstra over the resulting direct-segment graph.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import networkx as nx

from . import planar
from .exactnum import (
    QF_ZERO,
    CertInterval,
    QField,
    RadicalSum,
    cos_pi12,
    rs_of,
    rs_sqrt_scaled,
)
from .planar import Pt
from .tricomplex import Edge, Face, MarginError, TriComplex, edge_key

__all__ = [
    "Corridor",
    "DevelopedChart",
    "GeodesicResult",
    "SweepState",
    "place_face",
    "develop",
    "sweep",
    "direct_distance",
    "distances_from",
    "vertex_distance",
    "Angle",
    "angle_at",
]


# corridors and unfolding ----------------------------------------------------


@dataclass(frozen=True)
class Corridor:
    """Alternating face / shared-edge sequence with no immediate backtracking."""

    faces: tuple[Face, ...]
    edges: tuple[Edge, ...]

    def __post_init__(self) -> None:
        if len(self.edges) != len(self.faces) - 1:
            raise ValueError("need one shared edge per consecutive face pair")
        for i, e in enumerate(self.edges):
            f1, f2 = self.faces[i], self.faces[i + 1]
            if f1 == f2:
                raise ValueError("consecutive corridor faces must differ")
            if not (set(e) <= set(f1) and set(e) <= set(f2)):
                raise ValueError(f"edge {e} not shared by {f1} and {f2}")
            if i > 0 and e == self.edges[i - 1]:
                raise ValueError("corridor backtracks across an edge")


@dataclass(frozen=True)
class DevelopedChart:
    """Per-face planar images of a corridor; a vertex reached several times
    along the corridor has one image per occurrence."""

    corridor: Corridor
    charts: tuple[dict[int, Pt], ...]


def place_face(cx: TriComplex, f: Face) -> dict[int, Pt]:
    """Canonical chart of one face: longest edge on the positive x-axis.

    The type-3 vertex maps to the origin, type-2 to (L, 0), type-1 above.
    """
    from .generators import canonical_face_points

    p1, p2, p3 = canonical_face_points(cx.dc)
    by_type = {0: p1, 1: p2, 2: p3}
    return {v: by_type[cx.vertex_types[v]] for v in f}


def _third_of(f: Face, e: Edge) -> int:
    return next(v for v in f if v not in e)


def _unfold_next(
    cx: TriComplex, chart: dict[int, Pt], e: Edge, f_next: Face
) -> dict[int, Pt]:
    """Chart of f_next across edge e, on the far side of the previous face."""
    u1, u2 = e
    w = _third_of(f_next, e)
    prev_third = next(v for v in chart if v not in e)
    side = -planar.orient(chart[u1], chart[u2], chart[prev_third])
    da = cx.edge_length_sq(edge_key(u1, w))
    db = cx.edge_length_sq(edge_key(u2, w))
    pw = planar.third_vertex(chart[u1], chart[u2], da, db, side)
    return {u1: chart[u1], u2: chart[u2], w: pw}


def develop(cx: TriComplex, corridor: Corridor) -> DevelopedChart:
    charts = [place_face(cx, corridor.faces[0])]
    for e, f_next in zip(corridor.edges, corridor.faces[1:]):
        charts.append(_unfold_next(cx, charts[-1], e, f_next))
    return DevelopedChart(corridor, tuple(charts))


# visibility-fan sweep -------------------------------------------------------


@dataclass(frozen=True)
class SweepState:
    """One visited (corridor, last face) pair of a sweep from a source vertex.

    The source sits at the chart origin; `wedge` = (A, B) is the open CCW
    angular sector (cross(A, d) > 0 and cross(d, B) > 0) of directions whose
    rays from the source reach the last face through every corridor edge.
    """

    faces: tuple[Face, ...]
    chart: dict[int, Pt]
    entry: Optional[Edge]
    wedge: tuple[Pt, Pt]


def _in_open_wedge(wedge: tuple[Pt, Pt], p: Pt) -> bool:
    a, b = wedge
    return planar.cross_sign(a, p) > 0 and planar.cross_sign(p, b) > 0


def _narrow_wedge(
    wedge: tuple[Pt, Pt], p: Pt, q: Pt
) -> Optional[tuple[Pt, Pt]]:
    """Intersect the wedge with the sector spanned by directions p and q."""
    if planar.cross_sign(p, q) < 0:
        p, q = q, p
    a, b = wedge
    if planar.cross_sign(a, p) > 0:
        a = p
    if planar.cross_sign(q, b) > 0:
        b = q
    if planar.cross_sign(a, b) <= 0:
        return None
    return (a, b)


def min_dist_sq_on_edge_in_wedge(
    wedge: tuple[Pt, Pt], p: Pt, q: Pt
) -> Optional[QField]:
    """Squared distance from the origin to the closed wedge-clipped segment
    [p, q]; None when the clip is empty."""
    # candidate points: endpoints inside the wedge, wedge-ray clips, foot
    pts: list[Pt] = []
    a, b = wedge
    for pt in (p, q):
        if planar.cross(a, pt).sign() >= 0 and planar.cross(pt, b).sign() >= 0:
            pts.append(pt)
    v = planar.sub(q, p)
    for ray in (a, b):
        denom = planar.cross(ray, v)
        if denom.sign() == 0:
            continue
        # p + t v = s ray; crossing with ray: cross(p, ray) + t cross(v, ray) = 0
        t = planar.cross(p, ray) / denom
        if t.sign() >= 0 and (QField.rational(1) - t).sign() >= 0:
            hit = planar.add(p, planar.scale(v, t))
            s = planar.dot(hit, ray)
            if s.sign() >= 0:
                pts.append(hit)
    # perpendicular foot of the origin on the segment line
    t = planar.dot(planar.scale(p, QField.rational(-1)), v) / planar.norm_sq(v)
    if t.sign() >= 0 and (QField.rational(1) - t).sign() >= 0:
        foot = planar.add(p, planar.scale(v, t))
        if (
            planar.cross(a, foot).sign() >= 0
            and planar.cross(foot, b).sign() >= 0
        ):
            pts.append(foot)
    if not pts:
        return None
    best = planar.norm_sq(pts[0])
    for pt in pts[1:]:
        d = planar.norm_sq(pt)
        if (best - d).sign() > 0:
            best = d
    return best


def _min_dist_sq_float(wedge: tuple[Pt, Pt], p: Pt, q: Pt) -> float:
    """Float estimate of the squared origin distance to the wedge-clipped
    segment [p, q].  Used only for heap ordering and safely-margined pruning;
    extra candidate points merely weaken the estimate downward."""
    ax, ay = float(wedge[0][0]), float(wedge[0][1])
    bx, by = float(wedge[1][0]), float(wedge[1][1])
    px, py = float(p[0]), float(p[1])
    qx, qy = float(q[0]), float(q[1])
    vx, vy = qx - px, qy - py
    best = float("inf")
    for x, y in ((px, py), (qx, qy)):
        if ax * y - ay * x >= -1e-9 and x * by - y * bx >= -1e-9:
            d = x * x + y * y
            if d < best:
                best = d
    for rx, ry in ((ax, ay), (bx, by)):
        denom = rx * vy - ry * vx
        if denom == 0.0:
            continue
        t = (px * ry - py * rx) / denom
        if -1e-9 <= t <= 1 + 1e-9:
            x, y = px + t * vx, py + t * vy
            if x * rx + y * ry >= 0.0:
                d = x * x + y * y
                if d < best:
                    best = d
    vv = vx * vx + vy * vy
    if vv > 0.0:
        t = -(px * vx + py * vy) / vv
        if -1e-9 <= t <= 1 + 1e-9:
            x, y = px + t * vx, py + t * vy
            if (
                ax * y - ay * x >= -1e-9
                and x * by - y * bx >= -1e-9
            ):
                d = x * x + y * y
                if d < best:
                    best = d
    if best == float("inf"):
        return 0.0  # defensive: never prune on an unclear clip
    return best


@dataclass
class SweepResult:
    """Incrementally extendable sweep from one source vertex."""

    bound_sq: QField
    bound_f: float
    states: list[SweepState]
    # target vertex -> (squared length, corridor faces) of the best segment
    segments: dict[int, tuple[QField, tuple[Face, ...]]]
    heap: list
    counter: "itertools.count"


def _offer(
    segments: dict[int, tuple[QField, tuple[Face, ...]]],
    w: int,
    dist_sq: QField,
    faces: tuple[Face, ...],
) -> None:
    cur = segments.get(w)
    if cur is None or (dist_sq - cur[0]).sign() < 0:
        segments[w] = (dist_sq, faces)


def _start_sweep(cx: TriComplex, s: int) -> SweepResult:
    res = SweepResult(QF_ZERO, 0.0, [], {}, [], itertools.count())
    for f in cx.vertex_faces[s]:
        chart0 = place_face(cx, f)
        shift = chart0[s]
        chart = {v: planar.sub(p, shift) for v, p in chart0.items()}
        u1, u2 = [v for v in f if v != s]
        if planar.cross_sign(chart[u1], chart[u2]) < 0:
            u1, u2 = u2, u1
        wedge = (chart[u1], chart[u2])
        res.states.append(SweepState((f,), chart, None, wedge))
        for u in (u1, u2):
            _offer(res.segments, u, planar.norm_sq(chart[u]), (f,))
        exit_e = edge_key(u1, u2)
        nxt = [g for g in cx.edge_faces.get(exit_e, []) if g != f]
        if not nxt:
            continue
        md = _min_dist_sq_float(wedge, chart[u1], chart[u2])
        heapq.heappush(
            res.heap, (md, next(res.counter), (f,), chart, exit_e, nxt[0], wedge)
        )
    return res


def _extend_sweep(cx: TriComplex, res: SweepResult) -> None:
    """Process heap entries up to res.bound_f (with a safety margin)."""
    heap = res.heap
    cutoff = res.bound_f + 1e-6 * (1.0 + res.bound_f)
    while heap:
        if heap[0][0] > cutoff:
            break
        _, _, faces, chart, entry, f_next, wedge = heapq.heappop(heap)
        chart2 = _unfold_next(cx, chart, entry, f_next)
        faces2 = faces + (f_next,)
        w3 = _third_of(f_next, entry)
        p3 = chart2[w3]
        res.states.append(SweepState(faces2, chart2, entry, wedge))
        if _in_open_wedge(wedge, p3):
            _offer(res.segments, w3, planar.norm_sq(p3), faces2)
        for u in entry:
            e2 = edge_key(u, w3)
            nxt = [g for g in cx.edge_faces.get(e2, []) if g != f_next]
            if not nxt:
                continue
            w2 = _narrow_wedge(wedge, chart2[u], p3)
            if w2 is None:
                continue
            md = _min_dist_sq_float(w2, chart2[u], p3)
            heapq.heappush(
                heap, (md, next(res.counter), faces2, chart2, e2, nxt[0], w2)
            )


def sweep(cx: TriComplex, s: int, bound_sq: QField) -> SweepResult:
    """Cached visibility sweep from vertex s out to the given squared bound.

    Sweeps resume where they stopped, so repeated queries with growing bounds
    cost one full sweep at the largest bound overall.
    """
    if not hasattr(cx, "_sweep_cache"):
        cx._sweep_cache = {}
    cache: dict[int, SweepResult] = cx._sweep_cache
    res = cache.get(s)
    if res is None:
        res = _start_sweep(cx, s)
        cache[s] = res
    if (bound_sq - res.bound_sq).sign() > 0:
        res.bound_sq = bound_sq
        res.bound_f = float(bound_sq)
        _extend_sweep(cx, res)
    return res


def direct_distance(
    cx: TriComplex, u: int, w: int, upper_bound_sq: QField
) -> Optional[QField]:
    """Squared length of the shortest vertex-free straight segment u -> w,
    or None if every such segment exceeds the bound."""
    if u == w:
        raise ValueError("direct_distance needs distinct vertices")
    got = sweep(cx, u, upper_bound_sq).segments.get(w)
    if got is None or (got[0] - upper_bound_sq).sign() > 0:
        return None
    return got[0]


# shortest paths over the direct-segment graph -------------------------------


@dataclass(frozen=True)
class GeodesicResult:
    """Exact geodesic between two vertices.

    length is a sum of square roots of field elements; breakpoints lists the
    vertices visited (endpoints included); corridors holds one witness face
    sequence per straight segment.  unique is False when some equally short
    concatenation through different breakpoints was found.
    """

    source: int
    target: int
    length: RadicalSum
    breakpoints: tuple[int, ...]
    corridors: tuple[tuple[Face, ...], ...]
    unique: bool = True

    def length_interval(self, bits: int = 64) -> CertInterval:
        return self.length.cert_interval(bits)


def _bound_to_sq(bound: RadicalSum) -> QField:
    """A field element certified >= bound², for sweep pruning."""
    sq = bound.squared_if_single()
    if sq is not None:
        return sq
    hi = bound.interval(64)[1]
    return QField.rational(hi * hi)


def distances_from(
    cx: TriComplex,
    s: int,
    bound: RadicalSum,
    *,
    check_margin: bool = True,
) -> dict[int, GeodesicResult]:
    """Geodesics from s to every vertex within `bound` (inclusive).

    Dijkstra over direct segments; all comparisons are certified exact.
    Distances are trustworthy for vertices whose geodesic stays inside the
    truncation, which the margin guard ensures for balls of radius
    bound <= margin - 1 around s.
    """
    if s not in cx.depth or (
        check_margin and cx.depth[s] > cx.boundary_margin
    ):
        raise MarginError(f"source {s} outside the complex margin")
    bound_sq = _bound_to_sq(bound)
    zero = RadicalSum.zero()
    dist: dict[int, RadicalSum] = {s: zero}
    pred: dict[int, tuple[int, tuple[Face, ...]]] = {}
    non_unique: set[int] = set()
    done: set[int] = set()
    counter = itertools.count()
    heap: list = [(zero, next(counter), s)]
    while heap:
        d, _, u = heapq.heappop(heap)
        if u in done:
            continue
        done.add(u)
        rem = bound - d  # segments longer than the remaining budget are moot
        if rem.sign() < 0:
            continue
        for w, (seg_sq, faces) in sweep(cx, u, _bound_to_sq(rem)).segments.items():
            nd = d + RadicalSum.sqrt_of(seg_sq)
            if (nd - bound).sign() > 0:
                continue
            old = dist.get(w)
            if old is None or nd < old:
                dist[w] = nd
                pred[w] = (u, faces)
                non_unique.discard(w)
                heapq.heappush(heap, (nd, next(counter), w))
            elif w not in done and not (old < nd) and pred.get(w, (u,))[0] != u:
                non_unique.add(w)
    out: dict[int, GeodesicResult] = {}
    for w, d in dist.items():
        chain: list[int] = [w]
        cors: list[tuple[Face, ...]] = []
        v = w
        while v != s:
            v, faces = pred[v]
            chain.append(v)
            cors.append(faces)
        chain.reverse()
        cors.reverse()
        out[w] = GeodesicResult(
            s, w, d, tuple(chain), tuple(cors), w not in non_unique
        )
    return out


def _skeleton_upper_bound(cx: TriComplex, v: int, w: int) -> RadicalSum:
    """1-skeleton Dijkstra distance, an upper bound for the true geodesic."""
    counter = itertools.count()
    dist: dict[int, RadicalSum] = {v: RadicalSum.zero()}
    done: set[int] = set()
    heap: list = [(RadicalSum.zero(), next(counter), v)]
    while heap:
        d, _, u = heapq.heappop(heap)
        if u in done:
            continue
        done.add(u)
        if u == w:
            return d
        for e in cx.vertex_edges[u]:
            t = e[0] if e[1] == u else e[1]
            nd = d + RadicalSum.sqrt_of(cx.edge_length_sq(e))
            if t not in dist or nd < dist[t]:
                dist[t] = nd
                heapq.heappush(heap, (nd, next(counter), t))
    raise ValueError(f"vertices {v} and {w} are not connected")


def vertex_distance(
    cx: TriComplex, v: int, w: int, bound: Optional[RadicalSum] = None
) -> GeodesicResult:
    """Exact shortest geodesic between two vertices of the complex."""
    if v == w:
        return GeodesicResult(v, w, RadicalSum.zero(), (v,), ())
    if bound is None:
        bound = _skeleton_upper_bound(cx, v, w)
    res = distances_from(cx, v, bound)
    if w not in res:
        raise MarginError(
            f"no geodesic from {v} to {w} within bound {float(bound):.4f}"
        )
    return res[w]


# angles ---------------------------------------------------------------------


@dataclass(frozen=True)
class Angle:
    """units * pi/12 plus at most two arccos terms.

    Each term (d, n) stands for arccos(d / sqrt(n)) in [0, pi], with d a
    field element and n a positive field element (squared norm product).
    """

    units: int
    terms: tuple[tuple[QField, QField], ...] = ()

    def __float__(self) -> float:
        import math

        val = self.units * math.pi / 12
        for d, n in self.terms:
            c = float(d) / math.sqrt(float(n))
            val += math.acos(max(-1.0, min(1.0, c)))
        return val

    def _term_cmp_units(self, d: QField, n: QField, m12: int) -> int:
        """sign of (arccos(d/sqrt(n)) - m12 * pi/12)."""
        c_sq_cmp = (d * d - n).sign()  # |cos| vs 1
        if m12 <= 0:
            if m12 == 0:
                zero = d.sign() > 0 and c_sq_cmp == 0
                return 0 if zero else 1
            return 1
        if m12 >= 12:
            if m12 == 12:
                return 0 if (d.sign() < 0 and c_sq_cmp == 0) else -1
            return -1
        # arccos decreasing: arccos(c) vs t  <=>  cos t vs c
        diff = rs_sqrt_scaled(cos_pi12(m12), n) - rs_of(d)
        return diff.sign()

    def cmp_units(self, m12: int) -> int:
        """Certified sign of (self - m12 * pi/12)."""
        t = m12 - self.units
        if len(self.terms) == 0:
            return (0 - t > 0) - (0 - t < 0)
        if len(self.terms) == 1:
            d, n = self.terms[0]
            return self._term_cmp_units(d, n, t)
        (d1, n1), (d2, n2) = self.terms
        # theta1 + theta2 vs pi:  theta2 vs pi - theta1, arccos decreasing,
        # so the sign equals that of cos(pi - theta1) - cos(theta2)
        over_pi = (rs_sqrt_scaled(-d1, n2) - rs_sqrt_scaled(d2, n1)).sign()
        if t <= 0:
            if t == 0:
                both_zero = all(
                    d.sign() > 0 and (d * d - n).sign() == 0 for d, n in self.terms
                )
                return 0 if both_zero else 1
            return 1
        if t >= 24:
            if t == 24:
                both_pi = all(
                    d.sign() < 0 and (d * d - n).sign() == 0 for d, n in self.terms
                )
                return 0 if both_pi else -1
            return -1
        # cos(th1 + th2) * sqrt(n1 n2) = d1 d2 - sqrt((n1 - d1²)(n2 - d2²))
        lhs = rs_of(d1 * d2) - RadicalSum.sqrt_of(
            (n1 - d1 * d1) * (n2 - d2 * d2)
        )
        rhs = rs_sqrt_scaled(cos_pi12(t), n1 * n2)
        cos_cmp = (lhs - rhs).sign()
        if t <= 12:
            if over_pi > 0:
                return 1
            if over_pi == 0:
                return 0 if t == 12 else 1
            return -cos_cmp  # both in [0, pi]: arccos decreasing
        if over_pi <= 0:
            return -1
        return cos_cmp  # both in (pi, 2pi): cos increasing there

    def cert_interval(self, bits: int = 64) -> CertInterval:
        import sympy

        expr = sympy.pi * Fraction(self.units, 12)
        for d, n in self.terms:
            expr += sympy.acos(_to_sympy(d) / sympy.sqrt(_to_sympy(n)))
        digits = max(15, bits // 3)
        val = sympy.N(expr, digits)
        eps = Fraction(1, 10 ** (digits - 2))
        centre = Fraction(str(val))
        return CertInterval(centre - eps, centre + eps, self, bits)


def _to_sympy(x: QField):
    import sympy

    return (
        sympy.Rational(x.a)
        + sympy.Rational(x.b) * sympy.sqrt(2)
        + sympy.Rational(x.c) * sympy.sqrt(3)
        + sympy.Rational(x.d) * sympy.sqrt(6)
    )


def _first_direction(
    cx: TriComplex, res: GeodesicResult
) -> tuple[Face, Pt, dict[int, Pt]]:
    """(first face, direction to first breakpoint, source-centred chart)."""
    target = res.breakpoints[1]
    faces = res.corridors[0]
    chart0 = place_face(cx, faces[0])
    shift = chart0[res.source]
    chart = {v: planar.sub(p, shift) for v, p in chart0.items()}
    cur = dict(chart)
    for e_faces in range(len(faces) - 1):
        f1, f2 = faces[e_faces], faces[e_faces + 1]
        e = edge_key(*(set(f1) & set(f2)))
        cur = _unfold_next(cx, cur, e, f2)
    return faces[0], cur[target], chart


def _angle_candidates(
    cx: TriComplex,
    x: int,
    fy: Face,
    dy: Pt,
    chart_y: dict[int, Pt],
    fz: Face,
    dz: Pt,
    chart_z: dict[int, Pt],
) -> list[Angle]:
    """Possible link-path lengths between two directions at vertex x."""
    cands: list[Angle] = []
    if fy == fz:
        # both directions in one chart: direct Euclidean angle
        cands.append(
            Angle(0, ((planar.dot(dy, dz), planar.norm_sq(dy) * planar.norm_sq(dz)),))
        )
    g = cx.link_multigraph(x)
    simple = nx.Graph()
    simple.add_nodes_from(g.nodes)
    simple.add_edges_from(g.edges())
    unit = 24 // cx.n_of(x)

    def corner_terms(f: Face, d: Pt, chart: dict[int, Pt]) -> list[tuple[int, tuple]]:
        out = []
        for w in f:
            if w == x:
                continue
            ew = chart[w]
            out.append((w, (planar.dot(d, ew), planar.norm_sq(d) * planar.norm_sq(ew))))
        return out

    for wy, ty in corner_terms(fy, dy, chart_y):
        for wz, tz in corner_terms(fz, dz, chart_z):
            try:
                hops = nx.shortest_path_length(simple, wy, wz)
            except nx.NetworkXNoPath:
                continue
            terms = tuple(
                t for t in (ty, tz) if not (t[0].sign() > 0 and (t[0] * t[0] - t[1]).sign() == 0)
            )
            cands.append(Angle(hops * unit, terms))
    return cands


def angle_at(cx: TriComplex, x: int, y: int, z: int) -> Angle:
    """Link angle at vertex x between the geodesics [x, y] and [x, z]."""
    if y == x or z == x:
        raise ValueError("directions at x need y, z distinct from x")
    if y == z:
        return Angle(0)
    ry = vertex_distance(cx, x, y)
    rz = vertex_distance(cx, x, z)
    fy, dy, chy = _first_direction(cx, ry)
    fz, dz, chz = _first_direction(cx, rz)
    cands = _angle_candidates(cx, x, fy, dy, chy, fz, dz, chz)
    if not cands:
        raise ValueError(f"no link path between directions at {x}")
    return _min_angle(cands)


def _min_angle(cands: list[Angle]) -> Angle:
    best = cands[0]
    for c in cands[1:]:
        if _angle_lt(c, best):
            best = c
    return best


def _angle_lt(a: Angle, b: Angle) -> bool:
    """Certified a < b via interval refinement; ties resolve to False."""
    bits = 64
    from .exactnum import max_precision_bits

    while bits <= max_precision_bits():
        ia = a.cert_interval(bits)
        ib = b.cert_interval(bits)
        if ia.hi < ib.lo:
            return True
        if ib.hi <= ia.lo:
            return False
        bits *= 2
    # unresolvably close: treat as equal (either is a valid minimum)
    return False
