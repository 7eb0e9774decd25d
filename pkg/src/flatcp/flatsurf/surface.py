"""Flat surfaces presented by polygons with exact vertices and edge gluings.

Polygons are listed counter-clockwise.  Side ``e`` of polygon ``p`` runs
from vertex ``e`` to vertex ``e + 1``.  A gluing pairs two sides with a tag:
``+1`` for a translation (the two side vectors are opposite) and ``-1`` for
a half-translation ``z -> -z + c`` (the two side vectors are equal).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from ..exactnum import (
    FieldMismatch,
    JNum,
    KMat2,
    KNum,
    WedgeNum,
    common_field,
    jWedge,
    jxx,
    parse_knum,
)
from .geometry import Vec, in_sector, is_simple_ccw, signed_area2, vadd, vsub

__all__ = [
    "SurfaceError",
    "FlatSurface",
    "buildSurface",
    "jInvariant",
    "safVertical",
    "safDirection",
    "direction_matrix",
    "format_stratum",
]

Side = tuple[int, int]

_PLUS_X = (1, 0)
_MINUS_X = (-1, 0)


class SurfaceError(ValueError):
    """Invalid surface data or an operation unsupported for the surface."""


class _UnionFind:
    def __init__(self, items: Iterable):
        self.parent = {x: x for x in items}

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            # deterministic representative: the smaller key
            if rb < ra:
                ra, rb = rb, ra
            self.parent[rb] = ra


def _as_vec(v, f: int) -> Vec:
    x, y = v
    return (_as_k(x, f), _as_k(y, f))


def _as_k(x, f: int) -> KNum:
    if isinstance(x, str):
        x = parse_knum(x)
    if isinstance(x, KNum):
        if x.f == f:
            return x
        if x.b == 0:
            return KNum(x.a, 0, f)
        raise FieldMismatch(f"{x} is not in Q(sqrt {f})")
    return KNum(x, 0, f)


@dataclass(frozen=True, eq=False)
class FlatSurface:
    """A validated (half-)translation surface.  Build it with :func:`buildSurface`."""

    polygons: tuple[tuple[Vec, ...], ...]
    gluings: Mapping[Side, tuple[Side, int]]
    f: int
    template: Mapping | None = None
    involution: Mapping[Side, Side] | None = None
    meta: Mapping = field(default_factory=dict)

    # -- sides ---------------------------------------------------------------

    def sides(self) -> list[Side]:
        return [(p, e) for p, poly in enumerate(self.polygons) for e in range(len(poly))]

    def vertex(self, p: int, i: int) -> Vec:
        poly = self.polygons[p]
        return poly[i % len(poly)]

    def side_vector(self, p: int, e: int) -> Vec:
        return vsub(self.vertex(p, e + 1), self.vertex(p, e))

    def partner(self, side: Side) -> tuple[Side, int]:
        return self.gluings[side]

    @property
    def is_translation(self) -> bool:
        return all(tag == 1 for _, tag in self.gluings.values())

    @cached_property
    def edges(self) -> list[tuple[Side, Side, int]]:
        """One entry per glued pair ``(representative side, other side, tag)``;
        the representative is the smaller side in (polygon, index) order."""
        out = []
        for side in self.sides():
            other, tag = self.gluings[side]
            if side < other:
                out.append((side, other, tag))
        return out

    # -- vertices and cone points ---------------------------------------------

    @cached_property
    def _vertex_classes(self) -> dict[Side, Side]:
        uf = _UnionFind(self.sides())
        for (p, e), ((q, g), _tag) in self.gluings.items():
            np_ = len(self.polygons[p])
            nq = len(self.polygons[q])
            uf.union((p, e), (q, (g + 1) % nq))
            uf.union((p, (e + 1) % np_), (q, g))
        return {c: uf.find(c) for c in self.sides()}

    @cached_property
    def vertex_classes(self) -> list[list[Side]]:
        """Corners ``(polygon, vertex index)`` grouped by surface point."""
        groups: dict[Side, list[Side]] = {}
        for corner, root in self._vertex_classes.items():
            groups.setdefault(root, []).append(corner)
        return sorted((sorted(g) for g in groups.values()), key=lambda g: g[0])

    def vertex_class_of(self, p: int, i: int) -> int:
        root = self._vertex_classes[(p, i % len(self.polygons[p]))]
        for idx, group in enumerate(self.vertex_classes):
            if group[0] == root or root in group:
                return idx
        raise AssertionError("unreachable")

    @cached_property
    def _class_index(self) -> dict[Side, int]:
        out = {}
        for idx, group in enumerate(self.vertex_classes):
            for corner in group:
                out[corner] = idx
        return out

    def class_index(self, p: int, i: int) -> int:
        return self._class_index[(p, i % len(self.polygons[p]))]

    def corner_sector(self, p: int, i: int) -> tuple[Vec, Vec]:
        """``(outgoing side direction, direction back to the previous vertex)``."""
        v = self.vertex(p, i)
        return vsub(self.vertex(p, i + 1), v), vsub(self.vertex(p, i - 1), v)

    @cached_property
    def cone_angles(self) -> list[int]:
        """Cone angle of each vertex class as a multiple of pi."""
        out = []
        for group in self.vertex_classes:
            count = 0
            for p, i in group:
                out_dir, back = self.corner_sector(p, i)
                count += in_sector(out_dir, back, _PLUS_X) + in_sector(out_dir, back, _MINUS_X)
            out.append(count)
        return out

    @cached_property
    def orders(self) -> list[int]:
        """Order of each vertex class: zero order for translation surfaces,
        order of the quadratic differential otherwise (``-1`` is a pole)."""
        if self.is_translation:
            for c in self.cone_angles:
                if c % 2:
                    raise SurfaceError("odd cone angle on a translation surface")
            return [c // 2 - 1 for c in self.cone_angles]
        return [c - 2 for c in self.cone_angles]

    @cached_property
    def genus(self) -> int:
        chi = len(self.vertex_classes) - len(self.edges) + len(self.polygons)
        return (2 - chi) // 2

    def singular_classes(self) -> list[int]:
        return [i for i, k in enumerate(self.orders) if k != 0]

    def stratum(self) -> tuple[str, tuple[int, ...]]:
        """``("H", orders)`` or ``("Q", orders)`` with regular points dropped."""
        kind = "H" if self.is_translation else "Q"
        return kind, tuple(sorted(k for k in self.orders if k != 0))

    def stratum_name(self) -> str:
        kind, orders = self.stratum()
        return format_stratum(kind, orders)

    # -- metric data ------------------------------------------------------------

    def area(self) -> KNum:
        total = KNum(0, 0, self.f)
        for poly in self.polygons:
            total = total + signed_area2(poly)
        return total / 2

    def transform(self, m: KMat2) -> "FlatSurface":
        """Apply a matrix with positive determinant to every vertex."""
        if m.det().sign() <= 0:
            raise SurfaceError("transformation must preserve orientation")
        polys = [[m.apply(v) for v in poly] for poly in self.polygons]
        return _rebuild(self, polys)

    def translate_polygon(self, p: int, v: Vec) -> "FlatSurface":
        polys = [list(poly) for poly in self.polygons]
        polys[p] = [vadd(x, v) for x in polys[p]]
        return _rebuild(self, polys)

    # -- serialisation ------------------------------------------------------------

    def to_json(self) -> dict:
        gl = []
        for side, other, tag in self.edges:
            gl.append([list(side), list(other), "+" if tag == 1 else "-"])
        out: dict = {
            "field": self.f,
            "polygons": [[[str(x), str(y)] for x, y in poly] for poly in self.polygons],
            "gluings": gl,
        }
        if self.involution is not None:
            out["involution"] = [[list(a), list(b)] for a, b in sorted(self.involution.items())]
        if self.template is not None:
            out["templates"] = _template_to_json(self.template)
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    @classmethod
    def from_json(cls, obj: Mapping) -> "FlatSurface":
        f = int(obj.get("field", 1))
        polys = [[(parse_knum(str(x), f), parse_knum(str(y), f)) for x, y in poly] for poly in obj["polygons"]]
        gl = [((int(a[0]), int(a[1])), (int(b[0]), int(b[1])), 1 if t in ("+", 1, "+1") else -1) for a, b, t in obj["gluings"]]
        inv = None
        if obj.get("involution"):
            inv = {(int(a[0]), int(a[1])): (int(b[0]), int(b[1])) for a, b in obj["involution"]}
        tpl = _template_from_json(obj["templates"], f) if obj.get("templates") else None
        return buildSurface(polys, gl, field=f, template=tpl, involution=inv)


def format_stratum(kind: str, orders: Sequence[int]) -> str:
    """Format as ``H(1,1,2)`` or ``Q(-1^3,1,2)`` (repeated entries as powers)."""
    parts = []
    seq = sorted(orders)
    i = 0
    while i < len(seq):
        j = i
        while j < len(seq) and seq[j] == seq[i]:
            j += 1
        reps = j - i
        if seq[i] == -1 and reps > 1:
            parts.append(f"-1^{reps}")
        else:
            parts.extend(str(seq[i]) for _ in range(reps))
        i = j
    return f"{kind}({','.join(parts)})" if parts else f"{kind}(0)"


def _template_to_json(tpl: Mapping) -> dict:
    return {
        "name": tpl.get("name", "custom"),
        "coefficients": [[str(c) for c in row] for row in tpl["coefficients"]],
    }


def _template_from_json(obj: Mapping, f: int) -> dict:
    return {
        "name": obj.get("name", "custom"),
        "coefficients": [[Fraction(str(c)) for c in row] for row in obj["coefficients"]],
    }


def _rebuild(S: FlatSurface, polys) -> FlatSurface:
    gl = [(a, b, t) for a, b, t in S.edges]
    return buildSurface(polys, gl, field=S.f, template=S.template, involution=S.involution, meta=S.meta)


def buildSurface(
    polygons: Sequence[Sequence],
    gluings: Iterable,
    field: int | None = None,
    template: Mapping | None = None,
    involution: Mapping[Side, Side] | None = None,
    meta: Mapping | None = None,
) -> FlatSurface:
    """Validate polygons and gluings and return the surface.

    ``gluings`` is an iterable of ``((p, e), (q, g), tag)`` with tag ``+1``
    (or ``"+"``) for translations and ``-1`` (or ``"-"``) for half-translations.
    """
    raw = [list(poly) for poly in polygons]
    if not raw:
        raise SurfaceError("a surface needs at least one polygon")
    flat = [c for poly in raw for v in poly for c in v]
    parsed = [parse_knum(c) if isinstance(c, str) else c for c in flat]
    f = field if field is not None else common_field(parsed)
    if field is not None and common_field(parsed) not in (1, field):
        raise FieldMismatch("vertex coordinates outside the declared field")
    polys = tuple(tuple(_as_vec(v, f) for v in poly) for poly in raw)
    for idx, poly in enumerate(polys):
        if not is_simple_ccw(poly):
            raise SurfaceError(f"polygon {idx} is not a simple counter-clockwise polygon")
    sides = {(p, e) for p, poly in enumerate(polys) for e in range(len(poly))}
    table: dict[Side, tuple[Side, int]] = {}
    for a, b, tag in gluings:
        a = (int(a[0]), int(a[1]))
        b = (int(b[0]), int(b[1]))
        tag = 1 if tag in (1, "+", "+1") else -1 if tag in (-1, "-", "-1") else None
        if tag is None:
            raise SurfaceError("gluing tag must be '+' or '-'")
        for s in (a, b):
            if s not in sides:
                raise SurfaceError(f"side {s} does not exist")
            if s in table:
                raise SurfaceError(f"side {s} is glued twice")
        if a == b:
            raise SurfaceError(f"side {a} cannot be glued to itself")
        table[a] = (b, tag)
        table[b] = (a, tag)
    unmatched = sorted(sides - set(table))
    if unmatched:
        raise SurfaceError(f"unmatched sides: {unmatched}")
    for (p, e), ((q, g), tag) in table.items():
        u = vsub(polys[p][(e + 1) % len(polys[p])], polys[p][e])
        v = vsub(polys[q][(g + 1) % len(polys[q])], polys[q][g])
        ok = (u[0] == -v[0] and u[1] == -v[1]) if tag == 1 else (u[0] == v[0] and u[1] == v[1])
        if not ok:
            raise SurfaceError(f"sides {(p, e)} and {(q, g)} do not match for tag {'+' if tag == 1 else '-'}")
    # connectivity of the polygon adjacency graph
    seen = {0}
    stack = [0]
    while stack:
        p = stack.pop()
        for e in range(len(polys[p])):
            q = table[(p, e)][0][0]
            if q not in seen:
                seen.add(q)
                stack.append(q)
    if len(seen) != len(polys):
        raise SurfaceError("surface is disconnected")
    S = FlatSurface(polys, table, f, template, involution, dict(meta or {}))
    S.orders  # validates cone angles
    return S


# ---------------------------------------------------------------------------
# J-invariant and directional SAF


def jInvariant(S: FlatSurface) -> JNum:
    """``sum v_i ^ v_{i+1}`` over the vertices of every polygon."""
    if not S.is_translation:
        raise SurfaceError("J-invariant needs a translation surface; take the orientation double cover first")
    total = JNum([0] * 6, S.f)
    for poly in S.polygons:
        n = len(poly)
        for i in range(n):
            total = total + jWedge(poly[i], poly[(i + 1) % n])
    return total


def safVertical(S: FlatSurface) -> WedgeNum:
    """SAF invariant of the vertical flow, the ``x ^ x`` part of ``J``."""
    return jxx(jInvariant(S))


def direction_matrix(k, f: int) -> KMat2:
    """Normalising matrix for slope ``k`` (``None`` or ``"inf"`` is vertical)."""
    if k is None or (isinstance(k, str) and k.strip().lower() in ("inf", "infinity", "oo")):
        return KMat2.identity(f)
    if isinstance(k, str):
        k = parse_knum(k, f)
    k = _as_k(k, f)
    if not k:
        return KMat2(0, -1, 1, 0, f)
    return KMat2(1, -1 / k, 0, 1 / k, f)


def safDirection(S: FlatSurface, k) -> WedgeNum:
    """SAF invariant of the flow in the direction of slope ``k``."""
    m = direction_matrix(k, S.f)
    total = JNum([0] * 6, S.f)
    if not S.is_translation:
        raise SurfaceError("directional SAF needs a translation surface")
    for poly in S.polygons:
        img = [m.apply(v) for v in poly]
        n = len(img)
        for i in range(n):
            total = total + jWedge(img[i], img[(i + 1) % n])
    return jxx(total)
