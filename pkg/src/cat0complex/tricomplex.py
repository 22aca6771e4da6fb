"""Typed triangle 2-complexes, their simplicial operators and curvature checks.

A complex has vertices typed 1/2/3; every face carries one vertex of each
type; the face geometry is fixed by a disk-condition triple through
`TriangleShape`.  Validators cover the disk-condition inequality, free edges,
simple connectivity and the 2*pi girth condition on vertex links.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import networkx as nx

from .exactnum import QField, sin_pi12

BASE_CONDITIONS = {(6, 6, 6), (4, 8, 8), (4, 6, 12)}


class MarginError(Exception):
    """A query needed complex data beyond the faithful truncation radius."""


@dataclass(frozen=True)
class DiskCondition:
    n1: int
    n2: int
    n3: int

    def __post_init__(self):
        if min(self.n1, self.n2, self.n3) <= 0:
            raise ValueError("disk-condition entries must be positive")

    @property
    def triple(self) -> tuple[int, int, int]:
        return (self.n1, self.n2, self.n3)

    def angle_sum_defect(self) -> Fraction:
        """1/2 - sum(1/n_i); >= 0 iff the inequality holds."""
        return Fraction(1, 2) - sum(Fraction(1, n) for n in self.triple)

    def is_accepted(self) -> bool:
        return self.angle_sum_defect() >= 0

    def base(self) -> Optional[tuple[int, int, int]]:
        t = tuple(sorted(self.triple))
        key = {tuple(sorted(b)): b for b in BASE_CONDITIONS}.get(t)
        return self.triple if key is not None else None

    def is_base(self) -> bool:
        return self.base() is not None


@dataclass(frozen=True)
class DiskConditionResult:
    accepted: bool
    base: Optional[tuple[int, int, int]]
    code: str  # "base" | "strict-out-of-scope" | "rejected"


def validate_disk_condition(dc: DiskCondition) -> DiskConditionResult:
    if not dc.is_accepted():
        return DiskConditionResult(False, None, "rejected")
    if dc.is_base():
        return DiskConditionResult(True, dc.triple, "base")
    # accepted by the inequality, but only the flat base triples are realised
    return DiskConditionResult(True, None, "strict-out-of-scope")


@dataclass(frozen=True)
class TriangleShape:
    """Euclidean face geometry for a base disk-condition.

    angle_units[i] is the internal angle at the type-(i+1) vertex, in units of
    pi/12; side_sq[i] is the squared length of the edge opposite that vertex
    (i.e. between the other two vertex types), with the shortest edge length 1.
    """

    dc: DiskCondition
    angle_units: tuple[int, int, int]
    side_sq: tuple[QField, QField, QField]

    @property
    def sides(self) -> tuple[QField, QField, QField]:
        return self.side_sq


def triangle_shape(dc: DiskCondition) -> TriangleShape:
    if not dc.is_base():
        raise ValueError(f"not a base disk-condition: {dc.triple}")
    units = tuple(24 // n for n in dc.triple)  # 2*pi/n = (24/n) * pi/12
    assert sum(units) == 12  # angle sum pi
    sins = [sin_pi12(u) for u in units]
    smallest = min(range(3), key=lambda i: units[i])
    # law of sines, normalised so the side opposite the smallest angle is 1
    ratio = [sins[i] / sins[smallest] for i in range(3)]
    side_sq = tuple(r * r for r in ratio)
    return TriangleShape(dc, units, side_sq)  # type: ignore[arg-type]


# simplicial sets -----------------------------------------------------------

Edge = tuple[int, int]
Face = tuple[int, int, int]


def edge_key(u: int, w: int) -> Edge:
    return (u, w) if u < w else (w, u)


def face_key(f: Iterable[int]) -> Face:
    a, b, c = sorted(f)
    return (a, b, c)


@dataclass(frozen=True)
class SimplicialSet:
    """A set of simplices of a complex (not necessarily closed)."""

    vertices: frozenset[int] = frozenset()
    edges: frozenset[Edge] = frozenset()
    faces: frozenset[Face] = frozenset()

    @staticmethod
    def of(vertices=(), edges=(), faces=()) -> "SimplicialSet":
        return SimplicialSet(
            frozenset(vertices),
            frozenset(edge_key(*e) for e in edges),
            frozenset(face_key(f) for f in faces),
        )

    def closure(self) -> "SimplicialSet":
        verts = set(self.vertices)
        edges = set(self.edges)
        for f in self.faces:
            a, b, c = f
            edges.update({edge_key(a, b), edge_key(a, c), edge_key(b, c)})
        for e in edges:
            verts.update(e)
        return SimplicialSet(frozenset(verts), frozenset(edges), self.faces)

    def union(self, other: "SimplicialSet") -> "SimplicialSet":
        return SimplicialSet(
            self.vertices | other.vertices,
            self.edges | other.edges,
            self.faces | other.faces,
        )

    def difference(self, other: "SimplicialSet") -> "SimplicialSet":
        return SimplicialSet(
            self.vertices - other.vertices,
            self.edges - other.edges,
            self.faces - other.faces,
        )

    def intersection(self, other: "SimplicialSet") -> "SimplicialSet":
        return SimplicialSet(
            self.vertices & other.vertices,
            self.edges & other.edges,
            self.faces & other.faces,
        )

    def issubset(self, other: "SimplicialSet") -> bool:
        return (
            self.vertices <= other.vertices
            and self.edges <= other.edges
            and self.faces <= other.faces
        )

    def is_closed(self) -> bool:
        return self == self.closure()

    def simplex_count(self) -> int:
        return len(self.vertices) + len(self.edges) + len(self.faces)

    def canonical_lists(self) -> dict:
        return {
            "vertices": sorted(self.vertices),
            "edges": sorted(self.edges),
            "faces": sorted(self.faces),
        }


# the complex ---------------------------------------------------------------


class TriComplex:
    """Finite typed triangle 2-complex, immutable after construction.

    `vertex_types[v]` is 0/1/2 (handlebody class 1/2/3); every face has one
    vertex of each type.  `boundary_margin` is the combinatorial radius from
    vertex 0 up to which the complex faithfully truncates its infinite model;
    queries beyond it raise `MarginError`.
    """

    def __init__(
        self,
        dc: DiskCondition,
        vertex_types: Sequence[int],
        faces: Iterable[Iterable[int]],
        boundary_margin: int,
    ):
        self.dc = dc
        self.shape = triangle_shape(dc)
        self.vertex_types = tuple(vertex_types)
        self.faces: tuple[Face, ...] = tuple(sorted(face_key(f) for f in faces))
        self.boundary_margin = boundary_margin
        self.planar_coords: Optional[dict[int, tuple[QField, QField]]] = None

        nv = len(self.vertex_types)
        for f in self.faces:
            if max(f) >= nv:
                raise ValueError(f"face {f} references unknown vertex")
            types = sorted(self.vertex_types[v] for v in f)
            if types != [0, 1, 2]:
                raise ValueError(f"face {f} does not carry one vertex of each type")

        self.edge_faces: dict[Edge, list[Face]] = {}
        self.vertex_faces: dict[int, list[Face]] = {v: [] for v in range(nv)}
        self.vertex_edges: dict[int, set[Edge]] = {v: set() for v in range(nv)}
        for f in self.faces:
            a, b, c = f
            for e in (edge_key(a, b), edge_key(a, c), edge_key(b, c)):
                self.edge_faces.setdefault(e, []).append(f)
            for v in f:
                self.vertex_faces[v].append(f)
                self.vertex_edges[v].update(
                    edge_key(v, w) for w in f if w != v
                )
        self.edges: tuple[Edge, ...] = tuple(sorted(self.edge_faces))
        self.depth = self._bfs_depth(0)

    # basic structure

    def n_of(self, v: int) -> int:
        return self.dc.triple[self.vertex_types[v]]

    def num_vertices(self) -> int:
        return len(self.vertex_types)

    def neighbors(self, v: int) -> list[int]:
        return sorted({w for e in self.vertex_edges[v] for w in e if w != v})

    def edge_length_sq(self, e: Edge) -> QField:
        """Squared length of an edge, from the face shape (types of endpoints)."""
        t1, t2 = self.vertex_types[e[0]], self.vertex_types[e[1]]
        opposite = ({0, 1, 2} - {t1, t2}).pop()
        return self.shape.side_sq[opposite]

    def _bfs_depth(self, base: int) -> dict[int, int]:
        depth = {base: 0}
        frontier = [base]
        while frontier:
            nxt = []
            for v in frontier:
                for w in self.neighbors(v):
                    if w not in depth:
                        depth[w] = depth[v] + 1
                        nxt.append(w)
            frontier = nxt
        return depth

    def is_interior(self, v: int) -> bool:
        """True when the full star of v is inside the faithful truncation.

        Besides the combinatorial-depth margin this requires every edge at v
        to carry at least two faces: developments with edge orders above two
        leave single-face frontier edges at every vertex, and link or ball
        queries centred on such a vertex would silently see a clipped star.
        """
        if self.depth.get(v, 1 << 30) + 1 > self.boundary_margin:
            return False
        return all(len(self.edge_faces[e]) >= 2 for e in self.vertex_edges[v])

    def require_interior(self, v: int) -> None:
        if not self.is_interior(v):
            raise MarginError(f"vertex {v} is too close to the truncation boundary")

    # simplicial operators

    def full_set(self) -> SimplicialSet:
        return SimplicialSet.of(range(self.num_vertices()), self.edges, self.faces)

    def star(self, x: int) -> SimplicialSet:
        return SimplicialSet.of(
            {x}, self.vertex_edges[x], self.vertex_faces[x]
        ).closure()

    def link(self, x: int) -> SimplicialSet:
        st = self.star(x)
        return SimplicialSet(
            frozenset(v for v in st.vertices if v != x),
            frozenset(e for e in st.edges if x not in e),
            frozenset(),
        )

    def open_star(self, x: int) -> SimplicialSet:
        """x plus the open simplices at x; recorded as the non-link part of st."""
        return self.star(x).difference(self.link(x))

    def adj(self, c_set: SimplicialSet, x: int) -> SimplicialSet:
        return self.star(x).intersection(c_set)

    def adj_open(self, c_set: SimplicialSet, x: int) -> SimplicialSet:
        return self.adj(c_set, x).difference(self.link(x))

    def link_multigraph(self, x: int) -> nx.MultiGraph:
        """Simplicial link of x as a multigraph on neighbouring vertices."""
        g = nx.MultiGraph()
        g.add_nodes_from(w for w in self.link(x).vertices)
        for f in self.vertex_faces[x]:
            w1, w2 = [w for w in f if w != x]
            g.add_edge(w1, w2, face=f)
        return g


# metric link graph ---------------------------------------------------------


@dataclass
class LinkGraph:
    """Metric graph at a vertex: one node per edge of the complex at v, one
    link-edge per face at v, every link-edge of angular length 2*pi/n_v."""

    vertex: int
    n_v: int
    graph: nx.MultiGraph  # nodes: Edge keys; edges carry face=Face

    def girth_edges(self) -> Optional[tuple[int, list[Face]]]:
        """Length (in link-edges) and witness of a shortest cycle, or None."""
        g = self.graph
        best: Optional[tuple[int, list[Face]]] = None
        for u, w, k in list(g.edges(keys=True)):
            data = g.get_edge_data(u, w, k)
            g.remove_edge(u, w, k)
            try:
                path = nx.shortest_path(g, u, w)
                length = len(path)  # path edges + the removed one
                if best is None or length < best[0]:
                    cycle_faces = [data["face"]]
                    for a, b in zip(path, path[1:]):
                        cycle_faces.append(
                            next(iter(g.get_edge_data(a, b).values()))["face"]
                        )
                    best = (length, cycle_faces)
            except nx.NetworkXNoPath:
                pass
            finally:
                g.add_edge(u, w, key=k, **data)
        return best


def link_graph(cx: TriComplex, v: int) -> LinkGraph:
    cx.require_interior(v)
    g = nx.MultiGraph()
    g.add_nodes_from(cx.vertex_edges[v])
    for f in cx.vertex_faces[v]:
        e1, e2 = sorted(edge_key(v, w) for w in f if w != v)
        g.add_edge(e1, e2, face=f)
    return LinkGraph(v, cx.n_of(v), g)


@dataclass(frozen=True)
class LinkConditionResult:
    passed: bool
    girth_edges: Optional[int]  # None: link is a forest
    girth_angle_units: Optional[int]  # girth in units of pi/12
    witness_cycle: Optional[tuple[Face, ...]]


def check_link_condition(cx: TriComplex, v: int) -> LinkConditionResult:
    """Pass iff every essential link cycle has angular length >= 2*pi.

    Link edges have uniform length 2*pi/n_v, so the test is girth >= n_v edges.
    """
    lg = link_graph(cx, v)
    g = lg.girth_edges()
    if g is None:
        return LinkConditionResult(True, None, None, None)
    girth, cycle = g
    units = girth * (24 // lg.n_v)
    return LinkConditionResult(girth >= lg.n_v, girth, units, tuple(cycle))


# global validators ---------------------------------------------------------


@dataclass(frozen=True)
class ComplexReport:
    free_edge_violations: tuple[Edge, ...]
    connected: bool
    euler_characteristic: int
    simply_connected: bool
    link_failures: tuple[int, ...]
    cat0_certified: bool


def free_edge_violations(cx: TriComplex) -> list[Edge]:
    """Single-face edges lying strictly inside the margin.

    Uses the depth rule alone: under the flat (order-two) reading, an edge
    whose endpoints are both within the faithful radius must be shared by two
    faces, so one face only means the complex lies about its margin.
    """
    bad = []
    for e, faces in cx.edge_faces.items():
        inside = all(
            cx.depth.get(v, 1 << 30) + 1 <= cx.boundary_margin for v in e
        )
        if len(faces) < 2 and inside:
            bad.append(e)
    return sorted(bad)


def is_simply_connected(cx: TriComplex) -> tuple[bool, int, bool]:
    """(connected, euler characteristic, H1 trivial over GF(2))."""
    nv = cx.num_vertices()
    g = nx.Graph()
    g.add_nodes_from(range(nv))
    g.add_edges_from(cx.edges)
    connected = nv == 0 or nx.is_connected(g)
    chi = nv - len(cx.edges) + len(cx.faces)
    edge_index = {e: i for i, e in enumerate(cx.edges)}
    # GF(2) rank of the face-boundary matrix, as bitmask rows
    rows = []
    for f in cx.faces:
        a, b, c = f
        mask = 0
        for e in (edge_key(a, b), edge_key(a, c), edge_key(b, c)):
            mask |= 1 << edge_index[e]
        rows.append(mask)
    rank = 0
    pivots: dict[int, int] = {}
    for row in rows:
        while row:
            p = row.bit_length() - 1
            if p in pivots:
                row ^= pivots[p]
            else:
                pivots[p] = row
                rank += 1
                break
    cycle_dim = len(cx.edges) - nv + (1 if connected else nx.number_connected_components(g))
    simply = connected and rank == cycle_dim
    return connected, chi, simply


def validate_complex(
    cx: TriComplex,
    edge_orders: Optional[dict[tuple[int, int], int]] = None,
) -> ComplexReport:
    """Global CAT(0) gate.

    With `edge_orders` (unordered 1-based type pairs -> face counts) above
    two somewhere, single-face frontier edges are unavoidable in any finite
    truncation; the free-edge check then demands instead that every edge
    carries either its full order or exactly one face.
    """
    if edge_orders is not None and any(k > 2 for k in edge_orders.values()):
        free_list = []
        for e, fs in cx.edge_faces.items():
            t1, t2 = cx.vertex_types[e[0]], cx.vertex_types[e[1]]
            want = edge_orders[tuple(sorted((t1 + 1, t2 + 1)))]
            if len(fs) not in (1, want):
                free_list.append(e)
        free = tuple(sorted(free_list))
    else:
        free = tuple(free_edge_violations(cx))
    connected, chi, simply = is_simply_connected(cx)
    failures = []
    for v in range(cx.num_vertices()):
        if cx.is_interior(v):
            if not check_link_condition(cx, v).passed:
                failures.append(v)
    cat0 = not free and simply and chi == 1 and not failures
    return ComplexReport(free, connected, chi, simply, tuple(failures), cat0)


# file format ---------------------------------------------------------------


def to_json_dict(cx: TriComplex) -> dict:
    return {
        "disk_condition": list(cx.dc.triple),
        "vertices": [
            {"id": v, "type": cx.vertex_types[v] + 1}
            for v in range(cx.num_vertices())
        ],
        "faces": [list(f) for f in cx.faces],
        "boundary_margin": cx.boundary_margin,
    }


def dumps(cx: TriComplex) -> str:
    return json.dumps(to_json_dict(cx), indent=1) + "\n"


def from_json_dict(data: dict) -> TriComplex:
    try:
        dc = DiskCondition(*data["disk_condition"])
        margin = data["boundary_margin"]
        vertices = sorted(data["vertices"], key=lambda r: r["id"])
        if [r["id"] for r in vertices] != list(range(len(vertices))):
            raise ValueError("vertex ids must be 0..n-1")
        types = [r["type"] - 1 for r in vertices]
        return TriComplex(dc, types, data["faces"], margin)
    except KeyError as exc:
        raise ValueError(f"malformed complex file: missing {exc}") from exc


def loads(text: str) -> TriComplex:
    return from_json_dict(json.loads(text))


def store(cx: TriComplex, path) -> None:
    with open(path, "w") as fh:
        fh.write(dumps(cx))


def load(path) -> TriComplex:
    with open(path) as fh:
        return loads(fh.read())
