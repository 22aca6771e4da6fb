"""Exact 2D vector primitives over Q(sqrt2, sqrt3)."""

from __future__ import annotations

from .exactnum import QField, QF_ZERO

Pt = tuple[QField, QField]

ORIGIN: Pt = (QF_ZERO, QF_ZERO)


def add(p: Pt, q: Pt) -> Pt:
    return (p[0] + q[0], p[1] + q[1])


def sub(p: Pt, q: Pt) -> Pt:
    return (p[0] - q[0], p[1] - q[1])


def scale(p: Pt, k: QField) -> Pt:
    return (p[0] * k, p[1] * k)


def dot(p: Pt, q: Pt) -> QField:
    return p[0] * q[0] + p[1] * q[1]


def cross(p: Pt, q: Pt) -> QField:
    return p[0] * q[1] - p[1] * q[0]


def norm_sq(p: Pt) -> QField:
    return dot(p, p)


def dist_sq(p: Pt, q: Pt) -> QField:
    return norm_sq(sub(p, q))


def perp(p: Pt) -> Pt:
    return (-p[1], p[0])


def reflect(p: Pt, a: Pt, b: Pt) -> Pt:
    """Mirror image of p across the line through a and b."""
    v = sub(b, a)
    w = sub(p, a)
    t = dot(w, v) / norm_sq(v)
    foot = add(a, scale(v, t))
    return sub(add(foot, foot), p)


def orient(a: Pt, b: Pt, c: Pt) -> int:
    """Sign of the signed area of (a, b, c): +1 CCW, -1 CW, 0 collinear."""
    return cross(sub(b, a), sub(c, a)).sign()


def third_vertex(a: Pt, b: Pt, da_sq: QField, db_sq: QField, side: int) -> Pt:
    """The point at squared distance da_sq from a and db_sq from b, on the
    given side (+1 left / -1 right) of the directed line a -> b.

    Valid only when the height is exact in the field, which holds for all
    base-condition triangle shapes.
    """
    from .exactnum import qf_sqrt_if_exact

    v = sub(b, a)
    l2 = norm_sq(v)
    alpha = (da_sq - db_sq + l2) / l2.scale(2)
    h_sq = da_sq - alpha * alpha * l2  # squared height above the edge line
    beta = qf_sqrt_if_exact(h_sq / l2)
    if beta is None:
        raise ValueError("triangle height ratio not exact in the field")
    p = add(a, scale(v, alpha))
    off = scale(perp(v), beta)
    if side >= 0:
        return add(p, off)
    return sub(p, off)


def cross_sign(p: Pt, q: Pt) -> int:
    """Sign of cross(p, q): certified float screen, exact fallback."""
    x1, e1 = p[0].fapprox()
    y1, e2 = p[1].fapprox()
    x2, e3 = q[0].fapprox()
    y2, e4 = q[1].fapprox()
    v = x1 * y2 - y1 * x2
    err = (
        abs(x1) * e4
        + abs(y2) * e1
        + e1 * e4
        + abs(y1) * e3
        + abs(x2) * e2
        + e2 * e3
        + 1e-15 * (abs(x1 * y2) + abs(y1 * x2))
    )
    if abs(v) > err:
        return 1 if v > 0 else -1
    return cross(p, q).sign()
