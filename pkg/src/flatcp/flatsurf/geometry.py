"""Exact planar predicates on vectors with coordinates in a real quadratic
field.  Every test reduces to the sign of a :class:`KNum`."""

from __future__ import annotations

from typing import Sequence

from ..exactnum import KNum, KiNum, KMat2

Vec = tuple[KNum, KNum]


def vadd(u: Vec, v: Vec) -> Vec:
    return (u[0] + v[0], u[1] + v[1])


def vsub(u: Vec, v: Vec) -> Vec:
    return (u[0] - v[0], u[1] - v[1])


def vneg(u: Vec) -> Vec:
    return (-u[0], -u[1])


def vscale(u: Vec, c) -> Vec:
    return (u[0] * c, u[1] * c)


def cross(u: Vec, v: Vec) -> KNum:
    return u[0] * v[1] - u[1] * v[0]


def dot(u: Vec, v: Vec) -> KNum:
    return u[0] * v[0] + u[1] * v[1]


def is_zero(u: Vec) -> bool:
    return not u[0] and not u[1]


def upper_half(ref: Vec, v: Vec) -> bool:
    """True when the ccw angle from ``ref`` to ``v`` lies in ``[0, pi)``."""
    c = cross(ref, v).sign()
    return c > 0 or (c == 0 and dot(ref, v).sign() > 0)


def angle_less(ref: Vec, a: Vec, b: Vec) -> bool:
    """Compare ccw angles measured from ``ref`` in ``[0, 2 pi)``."""
    ha, hb = upper_half(ref, a), upper_half(ref, b)
    if ha != hb:
        return ha
    return cross(a, b).sign() > 0


def in_sector(start: Vec, end: Vec, d: Vec) -> bool:
    """Whether direction ``d`` lies in the half-open ccw sector ``[start, end)``."""
    if cross(start, d).sign() == 0 and dot(start, d).sign() > 0:
        return True
    return angle_less(start, d, end)


def signed_area2(poly: Sequence[Vec]) -> KNum:
    """Twice the signed area (positive for counter-clockwise polygons)."""
    n = len(poly)
    total = poly[0][0] * 0
    for i in range(n):
        total = total + cross(poly[i], poly[(i + 1) % n])
    return total


def _on_segment(p: Vec, a: Vec, b: Vec) -> bool:
    if cross(vsub(b, a), vsub(p, a)).sign() != 0:
        return False
    return dot(vsub(p, a), vsub(p, b)).sign() <= 0


def segments_intersect(a: Vec, b: Vec, c: Vec, d: Vec) -> bool:
    """Closed segments ``ab`` and ``cd`` share at least one point."""
    d1 = cross(vsub(b, a), vsub(c, a)).sign()
    d2 = cross(vsub(b, a), vsub(d, a)).sign()
    d3 = cross(vsub(d, c), vsub(a, c)).sign()
    d4 = cross(vsub(d, c), vsub(b, c)).sign()
    if d1 * d2 < 0 and d3 * d4 < 0:
        return True
    return (
        (d1 == 0 and _on_segment(c, a, b))
        or (d2 == 0 and _on_segment(d, a, b))
        or (d3 == 0 and _on_segment(a, c, d))
        or (d4 == 0 and _on_segment(b, c, d))
    )


def is_simple_ccw(poly: Sequence[Vec]) -> bool:
    """Counter-clockwise orientation, no degenerate edges, no self-contact."""
    n = len(poly)
    if n < 3 or signed_area2(poly).sign() <= 0:
        return False
    edges = [(poly[i], poly[(i + 1) % n]) for i in range(n)]
    if any(is_zero(vsub(b, a)) for a, b in edges):
        return False
    for i in range(n):
        for j in range(i + 1, n):
            a, b = edges[i]
            c, d = edges[j]
            if j == i + 1:
                # consecutive: only the shared vertex may be common
                if _on_segment(d, a, b) or _on_segment(a, c, d):
                    return False
                continue
            if i == 0 and j == n - 1:
                if _on_segment(c, a, b) or _on_segment(b, c, d):
                    return False
                continue
            if segments_intersect(a, b, c, d):
                return False
    return True


def point_in_polygon(p: Vec, poly: Sequence[Vec]) -> int:
    """1 inside, 0 on the boundary, -1 outside (exact winding test)."""
    n = len(poly)
    wn = 0
    for i in range(n):
        a, b = poly[i], poly[(i + 1) % n]
        if _on_segment(p, a, b):
            return 0
        if a[1] <= p[1]:
            if b[1] > p[1] and cross(vsub(b, a), vsub(p, a)).sign() > 0:
                wn += 1
        elif b[1] <= p[1] and cross(vsub(b, a), vsub(p, a)).sign() < 0:
            wn -= 1
    return 1 if wn else -1


def apply(m: KMat2, v: Vec) -> Vec:
    return m.apply(v)


def to_ki(v: Vec) -> KiNum:
    return KiNum(v[0], v[1])


def linf(v: Vec) -> KNum:
    x, y = abs(v[0]), abs(v[1])
    return x if x >= y else y
