"""Straight-line flow on flat surfaces: separatrices, cylinders and first
return maps.

Everything is computed for the vertical direction; other directions are
first brought to vertical by the similarity

    M = 1/(p^2 + q^2) * [[q, -p], [p, q]]

which sends ``(p, q)`` to ``(0, 1)``.  ``M`` rotates and scales by
``1/|(p, q)|``, so moduli are exact in every direction while widths and
heights are reported in the normalised picture.

Vertical rays are represented by ``(polygon, point, d)`` with ``d = +1``
(up) or ``d = -1`` (down) in the polygon's own chart.  Crossing a side with
tag ``-1`` flips ``d``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from ..exactnum import KMat2, KNum
from ..involutions import GenPerm, LinearInvolution
from .geometry import Vec, angle_less, in_sector, point_in_polygon, vadd, vsub
from .surface import FlatSurface, SurfaceError

__all__ = [
    "BudgetExhausted",
    "TraceResult",
    "traceSeparatrix",
    "Cylinder",
    "SaddleConnection",
    "CylinderDecomposition",
    "cylinderDecomposition",
    "TransversalPiece",
    "horizontal_transversal",
    "CrossSection",
    "crossSection",
    "direction_similarity",
]

_UP = (0, 1)
_DOWN = (0, -1)


class BudgetExhausted(RuntimeError):
    """A trajectory did not end within the allowed number of side crossings."""


def direction_similarity(direction, f: int) -> KMat2:
    """Similarity sending ``direction`` to the upward vertical."""
    p, q = direction
    n = p * p + q * q
    if not n:
        raise ValueError("direction must be non-zero")
    return KMat2(q / n, -p / n, p / n, q / n, f)


# ---------------------------------------------------------------------------
# first hits along an axis


@dataclass(frozen=True)
class _Hit:
    kind: str  # "vertex", "edge" or "transversal"
    index: int  # vertex index, side index or transversal piece index
    point: Vec
    dist: KNum


def _first_hit(S: FlatSurface, p: int, P: Vec, axis: int, d: int, pieces=()) -> _Hit | None:
    """First boundary point (or transversal piece) met by the ray from ``P``
    moving along coordinate ``axis`` in direction ``d``; hits at distance 0
    are ignored."""
    o = 1 - axis
    poly = S.polygons[p]
    n = len(poly)
    best: _Hit | None = None

    def consider(h: _Hit) -> None:
        nonlocal best
        if best is None or h.dist < best.dist or (h.dist == best.dist and h.kind == "vertex" and best.kind == "edge"):
            best = h

    for e in range(n):
        a, b = poly[e], poly[(e + 1) % n]
        if a[o] == b[o]:
            if a[o] == P[o]:
                for idx, v in ((e, a), ((e + 1) % n, b)):
                    dist = (v[axis] - P[axis]) * d
                    if dist > 0:
                        consider(_Hit("vertex", idx, v, dist))
            continue
        sa = (a[o] - P[o]).sign()
        sb = (b[o] - P[o]).sign()
        if sa * sb > 0:
            continue
        if sa == 0:
            dist = (a[axis] - P[axis]) * d
            if dist > 0:
                consider(_Hit("vertex", e, a, dist))
            continue
        if sb == 0:
            dist = (b[axis] - P[axis]) * d
            if dist > 0:
                consider(_Hit("vertex", (e + 1) % n, b, dist))
            continue
        t = (P[o] - a[o]) / (b[o] - a[o])
        c = a[axis] + t * (b[axis] - a[axis])
        dist = (c - P[axis]) * d
        if dist > 0:
            pt = (P[0], c) if axis == 1 else (c, P[1])
            consider(_Hit("edge", e, pt, dist))
    for k, piece in pieces:
        if piece.x0 <= P[0] <= piece.x1:
            dist = (piece.y - P[1]) * d
            if dist > 0 and (best is None or dist <= best.dist):
                best = _Hit("transversal", k, (P[0], piece.y), dist)
    return best


def _cross(S: FlatSurface, p: int, e: int, X: Vec) -> tuple[int, Vec, int]:
    """Carry a point of side ``(p, e)`` to the partner side.  Returns
    ``(polygon, point, tag)``."""
    (q, g), tag = S.gluings[(p, e)]
    start = S.vertex(p, e)
    target = S.vertex(q, g + 1)
    off = vsub(X, start)
    if tag == 1:
        return q, vadd(target, off), 1
    return q, vsub(target, off), -1


def _next_vertical(S: FlatSurface, p: int, i: int, ref: Vec) -> tuple[int, int, int]:
    """Walk counter-clockwise around vertex ``i`` of polygon ``p`` from the
    direction ``ref`` (given in the chart of ``p``) to the first vertical
    direction strictly after it.  Returns ``(polygon, vertex, d)``."""
    q, j = p, i
    first = True
    total = sum(len(poly) for poly in S.polygons)
    for _ in range(total + 1):
        out, back = S.corner_sector(q, j)
        cands = [(c, s) for c, s in ((_UP, 1), (_DOWN, -1)) if in_sector(out, back, c)]
        if first:
            cands = [(c, s) for c, s in cands if angle_less(out, ref, c) and not (c[0] == ref[0] and c[1] * ref[1] > 0)]
        if cands:
            if len(cands) == 2 and angle_less(out, cands[1][0], cands[0][0]):
                cands.reverse()
            return q, j, cands[0][1]
        (q2, g), _tag = S.gluings[(q, (j - 1) % len(S.polygons[q]))]
        q, j = q2, g
        first = False
    raise AssertionError("no vertical direction around a vertex")


def _regular(S: FlatSurface, p: int, i: int) -> bool:
    return S.orders[S.class_index(p, i)] == 0


@dataclass(frozen=True)
class _Ray:
    """End state of a vertical trajectory."""

    kind: str  # "vertex" or "transversal"
    polygon: int
    index: int
    point: Vec
    d: int
    length: KNum
    crossings: tuple = ()


def _trace_vertical(
    S: FlatSurface,
    p: int,
    P: Vec,
    d: int,
    budget: int,
    pieces_by_poly=None,
    through_regular: bool = False,
    record: bool = False,
) -> _Ray:
    length = KNum(0, 0, S.f)
    crossings = []
    steps = 0
    while True:
        pieces = pieces_by_poly.get(p, ()) if pieces_by_poly else ()
        hit = _first_hit(S, p, P, 1, d, pieces)
        if hit is None:
            raise SurfaceError("vertical ray leaves the polygon without meeting a side")
        length = length + hit.dist
        if hit.kind == "transversal":
            return _Ray("transversal", p, hit.index, hit.point, d, length, tuple(crossings))
        if hit.kind == "vertex":
            if through_regular and _regular(S, p, hit.index):
                p, j, d = _next_vertical(S, p, hit.index, (KNum(0, 0, S.f), KNum(-d, 0, S.f)))
                P = S.vertex(p, j)
                steps += 1
                if steps > budget:
                    raise BudgetExhausted(f"no end within {budget} steps")
                continue
            return _Ray("vertex", p, hit.index, hit.point, d, length, tuple(crossings))
        q, X, tag = _cross(S, p, hit.index, hit.point)
        if record:
            crossings.append(((p, hit.index), hit.point, (q, S.gluings[(p, hit.index)][0][1]), X))
        p, P, d = q, X, d * tag
        steps += 1
        if steps > budget:
            raise BudgetExhausted(f"no end within {budget} steps")


def _vertical_starts(S: FlatSurface, p: int, i: int) -> list[int]:
    out, back = S.corner_sector(p, i)
    return [s for c, s in ((_UP, 1), (_DOWN, -1)) if in_sector(out, back, c)]


# ---------------------------------------------------------------------------
# separatrices


@dataclass(frozen=True)
class TraceResult:
    """Outcome of following one separatrix."""

    start_class: int
    corner: tuple[int, int]
    closed: bool
    end_class: int | None
    holonomy: Vec | None
    steps: int

    def to_json(self) -> dict:
        return {
            "start": self.start_class,
            "corner": list(self.corner),
            "closed": self.closed,
            "end": self.end_class,
            "holonomy": None if self.holonomy is None else [str(self.holonomy[0]), str(self.holonomy[1])],
        }


def traceSeparatrix(S: FlatSurface, conePoint: int, direction=(0, 1), budget: int = 1000) -> list[TraceResult]:
    """Follow every separatrix leaving vertex class ``conePoint`` in
    ``direction`` until it reaches a vertex of the polygons.

    Each result is either a saddle connection (``closed``) with its holonomy
    in the original coordinates, or a budget hit.
    """
    f = S.f
    direction = tuple(_k(c, f) for c in direction)
    M = direction_similarity(direction, f)
    T = S.transform(M)
    Minv = M.inverse()
    out = []
    for p, i in S.vertex_classes[conePoint]:
        o, back = T.corner_sector(p, i)
        if not in_sector(o, back, _UP):
            continue
        try:
            ray = _trace_vertical(T, p, T.vertex(p, i), 1, budget)
        except BudgetExhausted:
            out.append(TraceResult(conePoint, (p, i), False, None, None, budget))
            continue
        hol = Minv.apply((KNum(0, 0, f), ray.length))
        out.append(TraceResult(conePoint, (p, i), True, T.class_index(ray.polygon, ray.index), hol, 0))
    return out


def _k(x, f: int) -> KNum:
    from .surface import _as_k

    return _as_k(x, f)


# ---------------------------------------------------------------------------
# cylinders


@dataclass(frozen=True)
class Cylinder:
    """``w`` is the circumference, ``h`` the transverse height, ``mu = h / w``."""

    w: KNum
    h: KNum
    boundary: tuple[int, ...] = ()

    @property
    def mu(self) -> KNum:
        return self.h / self.w

    @property
    def area(self) -> KNum:
        return self.w * self.h

    def to_json(self) -> dict:
        return {"w": str(self.w), "h": str(self.h), "mu": str(self.mu), "boundary": list(self.boundary)}


@dataclass(frozen=True)
class SaddleConnection:
    start: int
    end: int
    length: KNum

    def to_json(self) -> dict:
        return {"start": self.start, "end": self.end, "length": str(self.length)}


@dataclass(frozen=True)
class CylinderDecomposition:
    direction: tuple
    cylinders: tuple[Cylinder, ...]
    saddleConnections: tuple[SaddleConnection, ...]
    stable: bool
    zeros: int
    genus: int

    def to_json(self) -> dict:
        return {
            "direction": [str(c) for c in self.direction],
            "cylinders": [c.to_json() for c in self.cylinders],
            "saddleConnections": [s.to_json() for s in self.saddleConnections],
            "stable": self.stable,
            "count": len(self.cylinders),
            "bound": self.genus + self.zeros - 1,
        }


@dataclass
class _Piece:
    side: tuple[int, int]
    xl: KNum
    xr: KNum
    left: tuple
    right: tuple
    next: int = -1
    h_left: KNum | None = None
    h_right: KNum | None = None


def _edge_y(a: Vec, b: Vec, x: KNum) -> KNum:
    return a[1] + (x - a[0]) * (b[1] - a[1]) / (b[0] - a[0])


def cylinderDecomposition(S: FlatSurface, direction=(0, 1), budget: int = 1000) -> CylinderDecomposition:
    """Decompose a translation surface into cylinders in a periodic direction.

    Every upward separatrix from every polygon vertex is traced until it
    meets a vertex.  The cut points they leave on bottom sides split the
    polygons into vertical strips; strips chain into columns of closed
    leaves; columns separated only by regular points are merged.
    """
    if not S.is_translation:
        raise SurfaceError("cylinder decomposition needs a translation surface; take the orientation double cover first")
    f = S.f
    direction = tuple(_k(c, f) for c in direction)
    T = S.transform(direction_similarity(direction, f))

    # upward traces from every corner containing the upward direction
    traces = []
    for p, poly in enumerate(T.polygons):
        for i in range(len(poly)):
            out, back = T.corner_sector(p, i)
            if in_sector(out, back, _UP):
                ray = _trace_vertical(T, p, poly[i], 1, budget, record=True)
                traces.append(
                    {
                        "corner": (p, i),
                        "start": T.class_index(p, i),
                        "end": T.class_index(ray.polygon, ray.index),
                        "length": ray.length,
                        "crossings": ray.crossings,
                    }
                )
    cuts: dict[tuple[int, int], dict[KNum, int]] = {}
    for t_id, tr in enumerate(traces):
        for side_a, X, side_b, Y in tr["crossings"]:
            cuts.setdefault(side_a, {})[X[0]] = t_id
            cuts.setdefault(side_b, {})[Y[0]] = t_id

    regular = [k == 0 for k in T.orders]
    up_trace_of_class: dict[int, int] = {}
    into_class: dict[int, list[int]] = {}
    for t_id, tr in enumerate(traces):
        if regular[tr["start"]]:
            up_trace_of_class[tr["start"]] = t_id
        into_class.setdefault(tr["end"], []).append(t_id)

    def leaf_key(t_id: int):
        """Canonical key of the leaf through a trace, or ``"S"`` when the
        leaf meets a singular point."""
        seen = {t_id}
        t = t_id
        while True:
            end = traces[t]["end"]
            if not regular[end]:
                return "S"
            t = up_trace_of_class[end]
            if t in seen:
                break
            seen.add(t)
        t = t_id
        while True:
            start = traces[t]["start"]
            if not regular[start]:
                return "S"
            prev = into_class[start]
            t = prev[0]
            if t in seen:
                break
            seen.add(t)
        return min(seen)

    def vertex_key(cls: int):
        if not regular[cls]:
            return "S"
        return leaf_key(up_trace_of_class[cls])

    # bottom pieces
    pieces: list[_Piece] = []
    by_side: dict[tuple[int, int], list[int]] = {}
    for p, poly in enumerate(T.polygons):
        n = len(poly)
        for e in range(n):
            a, b = poly[e], poly[(e + 1) % n]
            if (b[0] - a[0]).sign() <= 0:
                continue
            labels = {a[0]: ("v", T.class_index(p, e)), b[0]: ("v", T.class_index(p, e + 1))}
            for x, t_id in cuts.get((p, e), {}).items():
                if x not in labels:
                    labels[x] = ("t", t_id)
            xs = sorted(labels)
            ids = []
            for xl, xr in zip(xs, xs[1:]):
                ids.append(len(pieces))
                pieces.append(_Piece((p, e), xl, xr, labels[xl], labels[xr]))
            by_side[(p, e)] = ids

    for piece in pieces:
        p, e = piece.side
        a, b = T.vertex(p, e), T.vertex(p, e + 1)
        xm = (piece.xl + piece.xr) / 2
        hit = _first_hit(T, p, (xm, _edge_y(a, b, xm)), 1, 1)
        if hit is None or hit.kind != "edge":
            raise SurfaceError("strip does not end on a side; separatrix data incomplete")
        ta, tb = T.vertex(p, hit.index), T.vertex(p, hit.index + 1)
        piece.h_left = _edge_y(ta, tb, piece.xl) - _edge_y(a, b, piece.xl)
        piece.h_right = _edge_y(ta, tb, piece.xr) - _edge_y(a, b, piece.xr)
        (q, g), _ = T.gluings[(p, hit.index)]
        shift = T.vertex(q, g + 1)[0] - ta[0]
        target = piece.xl + shift
        for j in by_side.get((q, g), []):
            if pieces[j].xl == target:
                piece.next = j
                break
        else:
            raise SurfaceError("strip image does not start at a cut point")

    # columns are the cycles of the strip map
    seen = [False] * len(pieces)
    columns = []
    for s in range(len(pieces)):
        if seen[s]:
            continue
        cyc = []
        j = s
        while not seen[j]:
            seen[j] = True
            cyc.append(j)
            j = pieces[j].next
        if j != s:
            raise SurfaceError("strip map is not a permutation")
        columns.append(cyc)

    def key_of(label):
        kind, v = label
        return vertex_key(v) if kind == "v" else leaf_key(v)

    col_data = []
    for cyc in columns:
        width = pieces[cyc[0]].xr - pieces[cyc[0]].xl
        circ_l = sum((pieces[j].h_left for j in cyc), KNum(0, 0, f))
        circ_r = sum((pieces[j].h_right for j in cyc), KNum(0, 0, f))
        if circ_l != circ_r:
            raise SurfaceError("column has unequal boundary lengths")
        lefts = {key_of(pieces[j].left) for j in cyc} - {"S"}
        rights = {key_of(pieces[j].right) for j in cyc} - {"S"}
        traces_on = {pieces[j].left[1] for j in cyc if pieces[j].left[0] == "t"}
        traces_on |= {pieces[j].right[1] for j in cyc if pieces[j].right[0] == "t"}
        col_data.append((width, circ_l, lefts, rights, traces_on))

    parent = list(range(len(columns)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, (_, _, _, rights, _) in enumerate(col_data):
        for j, (_, _, lefts, _, _) in enumerate(col_data):
            if i != j and rights & lefts:
                parent[find(i)] = find(j)

    # saddle connections: chains of traces between singular points
    saddle = []
    trace_to_sc: dict[int, int] = {}
    for t_id, tr in enumerate(traces):
        if regular[tr["start"]]:
            continue
        length = KNum(0, 0, f)
        t = t_id
        members = []
        while True:
            members.append(t)
            length = length + traces[t]["length"]
            end = traces[t]["end"]
            if not regular[end]:
                break
            t = up_trace_of_class[end]
        for m in members:
            trace_to_sc[m] = len(saddle)
        saddle.append(SaddleConnection(tr["start"], traces[t]["end"], length))

    groups: dict[int, list[int]] = {}
    for i in range(len(columns)):
        groups.setdefault(find(i), []).append(i)
    cylinders = []
    for members in sorted(groups.values()):
        circ = col_data[members[0]][1]
        if any(col_data[i][1] != circ for i in members):
            raise SurfaceError("merged columns have different circumferences")
        h = sum((col_data[i][0] for i in members), KNum(0, 0, f))
        bnd = sorted({trace_to_sc[t] for i in members for t in col_data[i][4] if t in trace_to_sc})
        cylinders.append(Cylinder(circ, h, tuple(bnd)))
    cylinders.sort(key=lambda c: (float(c.mu), float(c.w)))

    zeros = sum(1 for k in T.orders if k > 0)
    total = sum((c.area for c in cylinders), KNum(0, 0, f))
    if total != T.area():
        raise SurfaceError("cylinder areas do not add up to the surface area")
    stable = all(sc.start == sc.end for sc in saddle)
    if len(cylinders) > T.genus + zeros - 1 and zeros > 0:
        raise AssertionError("more cylinders than g + n - 1")
    return CylinderDecomposition(direction, tuple(cylinders), tuple(saddle), stable, zeros, T.genus)


# ---------------------------------------------------------------------------
# first return to a horizontal transversal


@dataclass(frozen=True)
class TransversalPiece:
    """Horizontal segment ``[x0, x1] x {y}`` inside polygon ``polygon``.

    ``orient = +1`` when the transversal coordinate grows with ``x``,
    ``-1`` when it grows with ``-x``.
    """

    polygon: int
    y: KNum
    x0: KNum
    x1: KNum
    orient: int = 1

    @property
    def length(self) -> KNum:
        return self.x1 - self.x0

    def to_json(self) -> dict:
        return {"polygon": self.polygon, "y": str(self.y), "x0": str(self.x0), "x1": str(self.x1), "orient": self.orient}


def horizontal_transversal(S: FlatSurface, polygon: int, start: Vec, length) -> list[TransversalPiece]:
    """Pieces of the horizontal segment of the given length leaving ``start``
    to the right (in the chart of ``polygon``), continued across sides."""
    f = S.f
    length = _k(length, f)
    p, P, d = polygon, (_k(start[0], f), _k(start[1], f)), 1
    pieces = []
    left = length
    for _ in range(10_000):
        hit = _first_hit(S, p, P, 0, d)
        if hit is None:
            raise SurfaceError("horizontal ray leaves the polygon")
        step = hit.dist if hit.dist < left else left
        x_end = P[0] + d * step
        lo, hi = (P[0], x_end) if d == 1 else (x_end, P[0])
        pieces.append(TransversalPiece(p, P[1], lo, hi, d))
        left = left - step
        if not left:
            return pieces
        if hit.kind != "edge":
            raise SurfaceError("transversal runs into a vertex")
        p, P, tag = _cross(S, p, hit.index, hit.point)
        d *= tag
    raise BudgetExhausted("transversal crosses too many sides")


@dataclass(frozen=True)
class CrossSection:
    involution: LinearInvolution
    heights: dict
    pieces: tuple[TransversalPiece, ...]

    def to_json(self) -> dict:
        return {
            "involution": self.involution.to_json(),
            "heights": {k: str(v) for k, v in sorted(self.heights.items())},
            "transversal": [p.to_json() for p in self.pieces],
        }


def crossSection(
    S: FlatSurface, transversal: Sequence[TransversalPiece], budget: int = 10_000, marked: bool = False
) -> CrossSection:
    """First return of the vertical foliation to a horizontal transversal.

    Row 0 collects the subintervals whose points leave the transversal
    upward (relative to its orientation), row 1 those leaving downward.
    Letters are ``"0", "1", ...`` in order of first appearance.  With
    ``marked`` the regular vertex classes also cut the transversal, as
    marked points do.
    """
    f = S.f
    pieces = list(transversal)
    offsets = []
    u = KNum(0, 0, f)
    for pc in pieces:
        if (pc.x1 - pc.x0).sign() <= 0:
            raise SurfaceError("transversal piece must have positive length")
        offsets.append(u)
        u = u + pc.length
    total = u
    by_poly: dict[int, list] = {}
    for k, pc in enumerate(pieces):
        by_poly.setdefault(pc.polygon, []).append((k, pc))

    def u_of(k: int, x: KNum) -> KNum:
        pc = pieces[k]
        return offsets[k] + (x - pc.x0 if pc.orient == 1 else pc.x1 - x)

    def point_of(uu: KNum) -> tuple[int, Vec]:
        for k, pc in enumerate(pieces):
            if offsets[k] <= uu < offsets[k] + pc.length:
                x = pc.x0 + (uu - offsets[k]) if pc.orient == 1 else pc.x1 - (uu - offsets[k])
                return k, (x, pc.y)
        raise AssertionError("point outside the transversal")

    cuts = {0: {KNum(0, 0, f), total}, 1: {KNum(0, 0, f), total}}
    for k in range(len(pieces)):
        for r in (0, 1):
            cuts[r].add(offsets[k])

    def add_cut(ray: _Ray) -> None:
        rel = ray.d * pieces[ray.index].orient
        cuts[1 if rel == 1 else 0].add(u_of(ray.index, ray.point[0]))

    # starting points: singular corners and the endpoints of the pieces
    starts: list[tuple[int, Vec, int]] = []
    special_classes = {c for c, k in enumerate(S.orders) if k != 0 or marked}
    endpoint_vertices = set()
    for pc in pieces:
        for x in (pc.x0, pc.x1):
            X = (x, pc.y)
            on_vertex = [i for i, v in enumerate(S.polygons[pc.polygon]) if v == X]
            if on_vertex:
                endpoint_vertices.add(S.class_index(pc.polygon, on_vertex[0]))
                continue
            reps = [(pc.polygon, X)]
            poly = S.polygons[pc.polygon]
            for e in range(len(poly)):
                a, b = poly[e], poly[(e + 1) % len(poly)]
                if _on_open_segment(X, a, b):
                    q, X2, _ = _cross(S, pc.polygon, e, X)
                    reps.append((q, X2))
            for q, Y in reps:
                for d in (1, -1):
                    starts.append((q, Y, d))
    for p, poly in enumerate(S.polygons):
        for i in range(len(poly)):
            if S.class_index(p, i) in special_classes | endpoint_vertices:
                for d in _vertical_starts(S, p, i):
                    starts.append((p, poly[i], d))

    for p, P, d in starts:
        hit = _first_hit(S, p, P, 1, d, by_poly.get(p, ()))
        if hit is None:
            continue
        mid = (P[0], (P[1] + hit.point[1]) / 2)
        if point_in_polygon(mid, S.polygons[p]) < 0:
            continue
        ray = _trace_vertical(S, p, P, d, budget, by_poly, through_regular=True)
        if ray.kind == "transversal":
            add_cut(ray)

    rows = {r: sorted(cuts[r]) for r in (0, 1)}
    intervals = {r: list(zip(rows[r], rows[r][1:])) for r in (0, 1)}
    twin = {}
    heights = {}
    for r in (0, 1):
        for idx, (a, b) in enumerate(intervals[r]):
            um = (a + b) / 2
            k, X = point_of(um)
            d = (1 if r == 0 else -1) * pieces[k].orient
            ray = _trace_vertical(S, pieces[k].polygon, X, d, budget, by_poly, through_regular=True)
            if ray.kind != "transversal":
                raise SurfaceError("a leaf through an interval midpoint hit a singularity")
            rel = ray.d * pieces[ray.index].orient
            r2 = 1 if rel == 1 else 0
            y = u_of(ray.index, ray.point[0])
            j = next(j for j, (c, e) in enumerate(intervals[r2]) if c <= y < e)
            c, e = intervals[r2][j]
            if e - c != b - a or (c + e) / 2 != y:
                raise SurfaceError("first return is not an isometry between cut intervals")
            twin[(r, idx)] = (r2, j)
            heights[(r, idx)] = ray.length
    for key, val in twin.items():
        if twin[val] != key:
            raise SurfaceError("first return is not an involution on intervals")

    label: dict[tuple[int, int], str] = {}
    nxt = 0
    for r in (0, 1):
        for idx in range(len(intervals[r])):
            if (r, idx) not in label:
                label[(r, idx)] = label[twin[(r, idx)]] = str(nxt)
                nxt += 1
    top = tuple(label[(0, i)] for i in range(len(intervals[0])))
    bottom = tuple(label[(1, i)] for i in range(len(intervals[1])))
    lengths = {label[(r, i)]: b - a for r in (0, 1) for i, (a, b) in enumerate(intervals[r])}
    area2 = sum(((b - a) * heights[(r, i)] for r in (0, 1) for i, (a, b) in enumerate(intervals[r])), KNum(0, 0, f))
    if area2 != 2 * S.area():
        raise SurfaceError("transversal misses some leaves (area deficit)")
    T = LinearInvolution(GenPerm(top, bottom), lengths, f)
    hts = {label[key]: h for key, h in heights.items()}
    return CrossSection(T, hts, tuple(pieces))


def _on_open_segment(X: Vec, a: Vec, b: Vec) -> bool:
    from .geometry import cross, dot

    if cross(vsub(b, a), vsub(X, a)).sign() != 0:
        return False
    return dot(vsub(X, a), vsub(X, b)).sign() < 0
