"""Diagnostic figures: developed patches with level-sphere arcs, via
matplotlib (written to SVG or any format the backend supports).

Write-only output for eyeball checks; every drawn arc/face incidence mirrors
the exact classification, and printed radii carry 12 significant digits taken
from certified intervals.
"""

from __future__ import annotations

import math
from typing import Optional

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from . import planar  # noqa: E402
from .balls import FaceIntersectionType, ball_view  # noqa: E402
from .exactnum import RadicalSum  # noqa: E402
from .geodesics import _unfold_next, place_face  # noqa: E402
from .tricomplex import TriComplex, edge_key  # noqa: E402

__all__ = ["format_radical", "render_ball", "FACE_COLORS"]

FACE_COLORS = {
    FaceIntersectionType.Empty: "#f4f4f4",
    FaceIntersectionType.Full: "#9ecae1",
    FaceIntersectionType.Type1: "#a1d99b",
    FaceIntersectionType.Type2: "#fdae6b",
    FaceIntersectionType.Type3: "#bcbddc",
    FaceIntersectionType.Type4: "#fc9272",
}


def format_radical(x: RadicalSum, sig: int = 12) -> str:
    """Decimal rendering with `sig` significant digits certified by interval
    refinement."""
    iv = x.cert_interval(64)
    target = abs(float(x)) * 10.0 ** (1 - sig) + 10.0 ** (-sig)
    while float(iv.width()) > target and iv.bits < 4096:
        iv = iv.refine()
    mid = (iv.lo + iv.hi) / 2
    return f"{float(mid):.{sig}g}"


def develop_complex(cx: TriComplex, v: int):
    """Breadth-first planar development from a face at v.

    Returns (per-face charts, image of v, flat) where flat is True when every
    edge carries at most two faces; then the development is globally
    consistent and the centre image is exact for every face.  With higher
    edge orders the patches overlap and only faces at v get trustworthy arcs.
    """
    at_v = [f for f in cx.faces if v in f]
    root = min(at_v) if at_v else min(cx.faces)
    chart0 = place_face(cx, root)
    if v in root:
        shift = chart0[v]
        chart0 = {w: planar.sub(p, shift) for w, p in chart0.items()}
    charts = {root: chart0}
    queue = [root]
    while queue:
        f = queue.pop(0)
        fa, fb, fc = f
        for e in (edge_key(fa, fb), edge_key(fa, fc), edge_key(fb, fc)):
            for g in cx.edge_faces.get(e, []):
                if g not in charts:
                    charts[g] = _unfold_next(cx, charts[f], e, g)
                    queue.append(g)
    flat = all(len(fs) <= 2 for fs in cx.edge_faces.values())
    center = charts[root].get(v)
    return charts, center, flat


def _circle_edge_hits(c, r, p, q):
    """Angles (radians at centre c) where the circle crosses segment pq."""
    dx, dy = q[0] - p[0], q[1] - p[1]
    fx, fy = p[0] - c[0], p[1] - c[1]
    a = dx * dx + dy * dy
    b = 2 * (fx * dx + fy * dy)
    cc = fx * fx + fy * fy - r * r
    disc = b * b - 4 * a * cc
    if disc <= 0:
        return []
    s = math.sqrt(disc)
    out = []
    for t in ((-b - s) / (2 * a), (-b + s) / (2 * a)):
        if 0 <= t <= 1:
            x, y = p[0] + t * dx, p[1] + t * dy
            out.append(math.atan2(y - c[1], x - c[0]))
    return out


def _inside_triangle(pt, tri) -> bool:
    sgn = 0
    for i in range(3):
        p, q = tri[i], tri[(i + 1) % 3]
        cr = (q[0] - p[0]) * (pt[1] - p[1]) - (q[1] - p[1]) * (pt[0] - p[0])
        if cr > 1e-12:
            if sgn < 0:
                return False
            sgn = 1
        elif cr < -1e-12:
            if sgn > 0:
                return False
            sgn = -1
    return True


def _draw_arcs(ax, center, r, tri, color="#d62728"):
    angles = []
    for i in range(3):
        angles.extend(_circle_edge_hits(center, r, tri[i], tri[(i + 1) % 3]))
    if not angles:
        return
    angles = sorted(angles)
    n = len(angles)
    for i in range(n):
        a0 = angles[i]
        a1 = angles[(i + 1) % n] + (2 * math.pi if i == n - 1 else 0)
        mid = (a0 + a1) / 2
        probe = (center[0] + r * math.cos(mid), center[1] + r * math.sin(mid))
        if _inside_triangle(probe, tri):
            ts = [a0 + (a1 - a0) * k / 32 for k in range(33)]
            ax.plot(
                [center[0] + r * math.cos(t) for t in ts],
                [center[1] + r * math.sin(t) for t in ts],
                color=color,
                lw=1.2,
                zorder=3,
            )


def render_ball(
    cx: TriComplex,
    v: int,
    r: RadicalSum,
    path: str,
    *,
    scale: float = 1.0,
    title: Optional[str] = None,
) -> None:
    """Draw the developed complex, faces coloured by sphere-intersection
    type, with the level-sphere arcs per face, and save the figure."""
    bv = ball_view(cx, v, r)
    charts, center_pt, flat = develop_complex(cx, v)
    center = (float(center_pt[0]), float(center_pt[1])) if center_pt else (0.0, 0.0)
    rf = float(r)
    fig, ax = plt.subplots(figsize=(7 * scale, 7 * scale))
    for f in cx.faces:
        chart = charts[f]
        tri = [(float(chart[w][0]), float(chart[w][1])) for w in f]
        kind = bv.face_types[f]
        ax.fill(
            [p[0] for p in tri],
            [p[1] for p in tri],
            facecolor=FACE_COLORS[kind],
            edgecolor="#555555",
            lw=0.5,
            zorder=1,
        )
        if not flat and v not in f:
            continue  # overlapping development: only star arcs are faithful
        if kind not in (FaceIntersectionType.Empty, FaceIntersectionType.Full):
            _draw_arcs(ax, center, rf, tri)
    ax.set_aspect("equal")
    ax.set_axis_off()
    ax.set_title(
        title
        if title is not None
        else f"ball around vertex {v}, r = {format_radical(r)}"
    )
    handles = [
        plt.Line2D([], [], marker="s", ls="", color=c, label=k.value)
        for k, c in FACE_COLORS.items()
    ]
    ax.legend(handles=handles, loc="upper right", fontsize=7)
    fig.savefig(path, bbox_inches="tight")
    plt.close(fig)
