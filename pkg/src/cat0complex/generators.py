"""Deterministic construction of desk-scale complexes.

Two families: `gen_seifert` develops the flat (n1,n2,n3) triangle tessellation
by exact reflections and truncates it at a combinatorial radius; `gen_regular`
grows a tree-like development in which every interior edge of a given
type-pair carries a prescribed number of faces.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from . import planar
from .exactnum import QField
from .planar import Pt
from .tricomplex import (
    DiskCondition,
    TriComplex,
    edge_key,
    load,
    store,
    triangle_shape,
)

__all__ = [
    "GenSpec",
    "gen_seifert",
    "gen_regular",
    "canonical_face_points",
    "store",
    "load",
]


def canonical_face_points(dc: DiskCondition) -> tuple[Pt, Pt, Pt]:
    """Vertices (p1, p2, p3) by type of one face, longest edge on the x-axis.

    The type-3 vertex sits at the origin, the type-2 vertex on the positive
    x-axis, the type-1 vertex above the axis.
    """
    shape = triangle_shape(dc)
    s1, s2, s3 = shape.side_sq  # side i is opposite the type-i vertex
    from .exactnum import qf_sqrt_if_exact

    length_23 = qf_sqrt_if_exact(s1)
    assert length_23 is not None
    p3 = planar.ORIGIN
    p2 = (length_23, QField.rational(0))
    p1 = planar.third_vertex(p3, p2, s2, s3, +1)
    return p1, p2, p3


@dataclass(frozen=True)
class GenSpec:
    """Build recipe for a generated complex.

    edge_orders maps unordered 1-based type pairs to face counts per edge;
    fan_closures optionally closes the face fan around a vertex type after a
    given number of faces (only meaningful when both edge types at that vertex
    have order two; the flat closure equals n_i).
    """

    dc: DiskCondition
    radius: int
    mode: str = "seifert"  # "seifert" | "regular"
    edge_orders: Optional[dict[tuple[int, int], int]] = None
    fan_closures: Optional[dict[int, int]] = None

    def order_of(self, t1: int, t2: int) -> int:
        """Face count per edge between 0-based vertex types t1, t2."""
        if self.edge_orders is None:
            return 2
        key = tuple(sorted((t1 + 1, t2 + 1)))
        return self.edge_orders[key]  # type: ignore[index]

    def validate(self) -> None:
        if self.radius < 0:
            raise ValueError("radius must be >= 0")
        if not self.dc.is_base():
            raise ValueError(f"not a base disk-condition: {self.dc.triple}")
        orders = {}
        for t1, t2 in ((0, 1), (0, 2), (1, 2)):
            k = self.order_of(t1, t2)
            if k < 2:
                raise ValueError(f"edge order {k} < 2 for types {(t1+1, t2+1)}")
            orders[(t1, t2)] = k
        if self.mode == "seifert" and any(k != 2 for k in orders.values()):
            raise ValueError("Seifert mode forces all edge orders = 2")
        if self.fan_closures:
            for tp1, closure in self.fan_closures.items():
                t = tp1 - 1
                n_t = self.dc.triple[t]
                incident = [orders[p] for p in orders if t in p]
                if any(k != 2 for k in incident):
                    raise ValueError(
                        "fan closure requires both edge orders 2 at that type"
                    )
                if closure < n_t:
                    raise ValueError(
                        f"fan closure {closure} at an n={n_t} vertex closes a "
                        f"link cycle of angle {closure}*2pi/{n_t} < 2pi"
                    )
                if closure != n_t:
                    raise ValueError(
                        "only the flat fan closure (= n_i) is constructible"
                    )


def gen_seifert(dc: DiskCondition, radius: int) -> TriComplex:
    """Truncated flat (n1,n2,n3) tessellation around a type-1 base vertex.

    Faces are developed by exact reflection; the result keeps every face whose
    three vertices lie within `radius` steps of the base in the 1-skeleton.
    Vertex ids are breadth-first from the base with type-ordered tie-breaks.
    """
    GenSpec(dc, radius, "seifert").validate()
    p1, p2, p3 = canonical_face_points(dc)
    base = p1  # base vertex is the type-1 corner, translated to the origin
    pts = tuple(planar.sub(p, base) for p in (p1, p2, p3))

    shape = triangle_shape(dc)
    from .exactnum import qf_sqrt_if_exact

    lmax_sq = max(shape.side_sq, key=lambda q: (q - shape.side_sq[0]).sign())
    # generate every face with a vertex inside the metric disc of radius
    # (radius+1) * longest-edge; that strictly contains the depth<=radius ball
    reach = QField.rational((radius + 1) * (radius + 1)) * lmax_sq

    def within_reach(p: Pt) -> bool:
        return (reach - planar.norm_sq(p)).sign() >= 0

    first = (pts[0], pts[1], pts[2])  # typed points (type0, type1, type2)
    seen = {frozenset(first)}
    queue = [first]
    faces_geo: list[tuple[Pt, Pt, Pt]] = []
    while queue:
        tri = queue.pop()
        faces_geo.append(tri)
        for i in range(3):
            a, b = tri[(i + 1) % 3], tri[(i + 2) % 3]
            mirrored = planar.reflect(tri[i], a, b)
            new = list(tri)
            new[i] = mirrored
            tri2 = tuple(new)
            key = frozenset(tri2)
            if key in seen:
                continue
            if not any(within_reach(p) for p in tri2):
                continue
            seen.add(key)
            queue.append(tri2)

    # collect typed vertices, deduplicated by exact coordinates
    coord_type: dict[Pt, int] = {}
    for tri in faces_geo:
        for t, p in enumerate(tri):
            coord_type[p] = t
    adjacency: dict[Pt, set[Pt]] = {p: set() for p in coord_type}
    for tri in faces_geo:
        for i in range(3):
            for j in range(3):
                if i != j:
                    adjacency[tri[i]].add(tri[j])

    origin = pts[0]
    depth = {origin: 0}
    frontier = [origin]
    while frontier:
        nxt = []
        for p in frontier:
            for q in adjacency[p]:
                if q not in depth:
                    depth[q] = depth[p] + 1
                    nxt.append(q)
        frontier = nxt

    kept_faces = [
        tri for tri in faces_geo if all(depth.get(p, radius + 1) <= radius for p in tri)
    ]
    if not kept_faces:  # radius 0: just the base vertex
        cx = TriComplex(dc, [0], [], boundary_margin=radius)
        cx.planar_coords = {0: origin}
        return cx
    kept_coords = sorted(
        {p for tri in kept_faces for p in tri},
        key=lambda p: (
            depth[p],
            coord_type[p],
            (p[0].a, p[0].b, p[0].c, p[0].d, p[1].a, p[1].b, p[1].c, p[1].d),
        ),
    )
    ids = {p: i for i, p in enumerate(kept_coords)}
    types = [coord_type[p] for p in kept_coords]
    faces = [tuple(ids[p] for p in tri) for tri in kept_faces]
    cx = TriComplex(dc, types, faces, boundary_margin=radius)
    cx.planar_coords = {ids[p]: p for p in kept_coords}
    return cx


def gen_regular(
    dc: DiskCondition,
    edge_orders: dict[tuple[int, int], int],
    radius: int,
) -> TriComplex:
    """Tree-like development with the given per-type-pair edge orders.

    Every edge born before the last growth round carries exactly its
    prescribed number of faces; no identifications are made beyond those, so
    vertex links are trees and the result is simply connected.  With all
    orders two the development closes flat and the Seifert tessellation is
    returned instead.
    """
    spec = GenSpec(dc, radius, "regular", edge_orders)
    spec.validate()
    if all(spec.order_of(*p) == 2 for p in ((0, 1), (0, 2), (1, 2))):
        return gen_seifert(dc, radius)

    types: list[int] = [0, 1, 2]
    faces: list[tuple[int, int, int]] = [(0, 1, 2)]
    edge_face_count: dict[tuple[int, int], int] = {
        edge_key(0, 1): 1,
        edge_key(0, 2): 1,
        edge_key(1, 2): 1,
    }
    # R rounds of filling; edges born in the last round stay single-face
    # frontier edges (with orders above two no finite complex avoids them)
    current = list(edge_face_count)
    for _ in range(radius):
        new_edges = []
        for e in current:
            t1, t2 = types[e[0]], types[e[1]]
            t3 = ({0, 1, 2} - {t1, t2}).pop()
            want = spec.order_of(t1, t2)
            while edge_face_count[e] < want:
                v = len(types)
                types.append(t3)
                faces.append((e[0], e[1], v))
                edge_face_count[e] += 1
                for u in e:
                    e2 = edge_key(u, v)
                    edge_face_count[e2] = 1
                    new_edges.append(e2)
        current = new_edges
    cx = TriComplex(dc, types, faces, boundary_margin=radius)
    return cx
