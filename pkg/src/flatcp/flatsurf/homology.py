"""Integral homology of a polygonal surface, periods and flux integrals.

The cell structure is the obvious one: vertex classes, glued side pairs and
polygons.  A basis of ``H_1`` comes from a tree-cotree decomposition: a
spanning tree of the vertex graph, a spanning tree of the dual graph on the
remaining edges, and one cycle per leftover edge.  For each basis cycle a
dual cocycle is built (value 1 on its own leftover edge, 0 on the other
leftover edges and on tree edges, and cotree values forced by closedness).
Wedge integrals of cocycles reduce to a per-polygon formula, which yields
the cup-product matrix ``Omega``; the intersection matrix is ``-Omega^-1``.

An edge chain is given as a mapping ``{(polygon, side): coefficient}``.
Sides are traversed counter-clockwise along their polygon, so the partner
side of a glued pair counts with the opposite sign.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Mapping, Sequence

from ..exactnum import KiNum, KNum
from .surface import FlatSurface, SurfaceError

__all__ = [
    "HomologyBasis",
    "homologyBasis",
    "periods",
    "period_of_chain",
    "chain_coordinates",
    "intersection",
    "wedge_integral",
    "fluxForm",
    "complexFlux",
    "omega_wedge_conj",
    "chain_vector",
    "area_from_periods",
    "FluxPrecheckFailed",
    "rat_inverse",
]


class FluxPrecheckFailed(ValueError):
    """The form does not satisfy ``int omega ^ omega' = 0``."""


def rat_inverse(m: Sequence[Sequence[Fraction]]) -> list[list[Fraction]]:
    """Inverse of a square rational matrix by Gauss-Jordan elimination."""
    n = len(m)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col]), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        a[col], a[piv] = a[piv], a[col]
        c = a[col][col]
        a[col] = [x / c for x in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                k = a[r][col]
                a[r] = [x - k * y for x, y in zip(a[r], a[col])]
    return [row[n:] for row in a]


@dataclass(frozen=True, eq=False)
class HomologyBasis:
    """Basis cycles, dual cocycles and the pairing matrices.

    ``cycles[k]`` and ``cocycles[k]`` are vectors indexed by edge number
    (``surface.edges`` order).  ``omega[k][l]`` is the wedge integral of the
    cocycles ``k`` and ``l``; ``intersection[k][l]`` is the algebraic
    intersection number of the cycles ``k`` and ``l``.
    """

    surface: FlatSurface
    cycles: tuple[tuple[int, ...], ...]
    cocycles: tuple[tuple[Fraction, ...], ...]
    omega: tuple[tuple[Fraction, ...], ...]

    @cached_property
    def intersection(self) -> list[list[int]]:
        inv = rat_inverse(self.omega)
        out = []
        for row in inv:
            out_row = []
            for x in row:
                if x.denominator != 1:
                    raise AssertionError("intersection numbers must be integers")
                out_row.append(-int(x))
            out.append(out_row)
        return out

    @property
    def rank(self) -> int:
        return len(self.cycles)


def _edge_index(S: FlatSurface) -> dict:
    """Map each side to ``(edge number, sign)``."""
    idx = {}
    for k, (a, b, _tag) in enumerate(S.edges):
        idx[a] = (k, 1)
        idx[b] = (k, -1)
    return idx


def chain_vector(S: FlatSurface, chain: Mapping) -> list[Fraction]:
    """Edge-indexed coefficient vector of a side chain."""
    idx = _edge_index(S)
    vec = [Fraction(0)] * len(S.edges)
    for side, c in chain.items():
        p, e = side
        k, s = idx[(p, e % len(S.polygons[p]))]
        vec[k] += s * Fraction(c)
    return vec


def boundary(S: FlatSurface, vec: Sequence) -> dict[int, Fraction]:
    """Boundary of an edge chain as a map vertex class -> coefficient."""
    out: dict[int, Fraction] = {}
    for k, (a, _b, _t) in enumerate(S.edges):
        c = vec[k]
        if not c:
            continue
        p, e = a
        start, end = S.class_index(p, e), S.class_index(p, e + 1)
        out[end] = out.get(end, 0) + c
        out[start] = out.get(start, 0) - c
    return {v: c for v, c in out.items() if c}


def homologyBasis(S: FlatSurface) -> HomologyBasis:
    """Deterministic tree-cotree basis of ``H_1(S, Z)``."""
    edges = S.edges
    n_v = len(S.vertex_classes)
    # primal spanning tree by breadth-first search from vertex class 0
    adj: dict[int, list[tuple[int, int, int]]] = {v: [] for v in range(n_v)}
    for k, (a, _b, _t) in enumerate(edges):
        p, e = a
        u, v = S.class_index(p, e), S.class_index(p, e + 1)
        adj[u].append((k, v, 1))
        adj[v].append((k, u, -1))
    parent: dict[int, tuple[int, int, int] | None] = {0: None}
    order = [0]
    for u in order:
        for k, v, s in adj[u]:
            if v not in parent:
                parent[v] = (k, u, s)
                order.append(v)
    tree = {pk[0] for pk in parent.values() if pk is not None}

    # dual spanning tree over edges outside the primal tree
    sides_of = {k: (a, b) for k, (a, b, _t) in enumerate(edges)}
    n_f = len(S.polygons)
    dual_adj: dict[int, list[tuple[int, int]]] = {f: [] for f in range(n_f)}
    for k, (a, b) in sides_of.items():
        if k in tree:
            continue
        dual_adj[a[0]].append((k, b[0]))
        dual_adj[b[0]].append((k, a[0]))
    dparent: dict[int, int | None] = {0: None}
    dorder = [0]
    for f in dorder:
        for k, g in dual_adj[f]:
            if g not in dparent:
                dparent[g] = k
                dorder.append(g)
    cotree = {k for k in dparent.values() if k is not None}
    leftover = [k for k in range(len(edges)) if k not in tree and k not in cotree]

    def tree_path(v: int) -> dict[int, int]:
        """Edge chain from vertex 0 to ``v`` inside the tree."""
        chain: dict[int, int] = {}
        while parent[v] is not None:
            k, u, s = parent[v]
            chain[k] = chain.get(k, 0) + s
            v = u
        return chain

    cycles = []
    for k in leftover:
        p, e = edges[k][0]
        u, v = S.class_index(p, e), S.class_index(p, e + 1)
        vec = [0] * len(edges)
        vec[k] += 1
        for j, c in tree_path(v).items():
            vec[j] -= c
        for j, c in tree_path(u).items():
            vec[j] += c
        cycles.append(tuple(vec))

    face_sides = [[(p, e) for e in range(len(poly))] for p, poly in enumerate(S.polygons)]
    idx = _edge_index(S)
    cocycles = []
    for k in leftover:
        val: dict[int, Fraction] = {j: Fraction(0) for j in range(len(edges)) if j not in cotree}
        val[k] = Fraction(1)
        # peel the dual tree from its leaves: each face sum must vanish
        for f in reversed(dorder[1:]):
            j = dparent[f]
            total = Fraction(0)
            sign_j = 0
            for side in face_sides[f]:
                m, s = idx[side]
                if m == j:
                    sign_j += s
                else:
                    total += s * val[m]
            val[j] = -total / sign_j
        cocycles.append(tuple(val[j] for j in range(len(edges))))

    # sanity: closedness on every face
    for co in cocycles:
        for f in range(n_f):
            if sum((s * co[m] for m, s in (idx[side] for side in face_sides[f])), Fraction(0)):
                raise AssertionError("cocycle is not closed")

    omega = tuple(
        tuple(_wedge_cochains(S, idx, face_sides, a, b) for b in cocycles) for a in cocycles
    )
    return HomologyBasis(S, tuple(cycles), tuple(cocycles), omega)


def _wedge_cochains(S, idx, face_sides, a, b):
    total = None
    for sides in face_sides:
        va = [s * a[m] for m, s in (idx[side] for side in sides)]
        vb = [s * b[m] for m, s in (idx[side] for side in sides)]
        pa = 0
        pb = 0
        acc = 0
        # sum_{i<j} (a_i b_j - a_j b_i) = sum_j (P^a_j b_j - P^b_j a_j)
        for x, y in zip(va, vb):
            acc = acc + pa * y - pb * x
            pa = pa + x
            pb = pb + y
        total = acc if total is None else total + acc
    return total / 2


def _edge_holonomy(S: FlatSurface) -> list[KiNum]:
    return [KiNum(*S.side_vector(*a), f=S.f) for a, _b, _t in S.edges]


def periods(S: FlatSurface, basis: HomologyBasis | None = None) -> list[KiNum]:
    """Periods of ``omega = dz`` on the basis cycles (translation surfaces only)."""
    if not S.is_translation:
        raise SurfaceError("periods of dz need a translation surface")
    basis = basis or homologyBasis(S)
    hol = _edge_holonomy(S)
    return [_pair(cyc, hol, S.f) for cyc in basis.cycles]


def _pair(vec, hol, f) -> KiNum:
    total = KiNum(0, 0, f)
    for c, h in zip(vec, hol):
        if c:
            total = total + h * Fraction(c)
    return total


def period_of_chain(S: FlatSurface, chain: Mapping) -> KiNum:
    """Integral of ``dz`` along an edge chain."""
    if not S.is_translation:
        raise SurfaceError("periods of dz need a translation surface")
    return _pair(chain_vector(S, chain), _edge_holonomy(S), S.f)


def chain_coordinates(basis: HomologyBasis, chain: Mapping) -> list[Fraction]:
    """Coordinates of a closed edge chain in the basis cycles."""
    S = basis.surface
    vec = chain_vector(S, chain)
    if boundary(S, vec):
        raise SurfaceError("chain is not closed")
    return [sum((c * x for c, x in zip(co, vec)), Fraction(0)) for co in basis.cocycles]


def intersection(basis: HomologyBasis, x: Mapping, y: Mapping) -> int:
    """Algebraic intersection number of two closed edge chains."""
    cx = chain_coordinates(basis, x)
    cy = chain_coordinates(basis, y)
    Q = basis.intersection
    return int(sum(cx[i] * Q[i][j] * cy[j] for i in range(len(cx)) for j in range(len(cy))))


def wedge_integral(basis: HomologyBasis, a: Sequence, b: Sequence):
    """``int alpha ^ beta`` for closed forms given by their basis periods."""
    Om = basis.omega
    total = None
    for i, ai in enumerate(a):
        for j, bj in enumerate(b):
            if Om[i][j]:
                term = ai * bj * Om[i][j]
                total = term if total is None else total + term
    return total if total is not None else 0


def area_from_periods(basis: HomologyBasis) -> KNum:
    """Area as ``-1/2 Im int omega ^ conj(omega)``."""
    w = periods(basis.surface, basis)
    val = wedge_integral(basis, w, [z.cc() for z in w])
    return -(_as_ki(val, basis.surface.f).im) / 2


def _as_ki(x, f) -> KiNum:
    return x if isinstance(x, KiNum) else KiNum(x, 0, f)


def fluxForm(S: FlatSurface, basis: HomologyBasis | None = None, rho: str = "re") -> KNum:
    """``-int rho ^ rho'`` for ``rho`` the real (``"re"``) or imaginary
    (``"im"``) part of ``dz``."""
    basis = basis or homologyBasis(S)
    w = periods(S, basis)
    if rho == "re":
        r = [z.re for z in w]
    elif rho == "im":
        r = [z.im for z in w]
    else:
        raise ValueError("rho must be 're' or 'im'")
    val = wedge_integral(basis, r, [x.conj() for x in r])
    return KNum(0, 0, S.f) - val


def omega_wedge_conj(S: FlatSurface, basis: HomologyBasis | None = None) -> KiNum:
    """``int omega ^ omega'`` (Galois conjugate, no complex conjugation)."""
    basis = basis or homologyBasis(S)
    w = periods(S, basis)
    return _as_ki(wedge_integral(basis, w, [z.conj() for z in w]), S.f)


def complexFlux(S: FlatSurface, basis: HomologyBasis | None = None, scale: KiNum | None = None) -> KiNum:
    """``Flux(k omega) = -int k omega ^ conj(k omega)'`` after checking
    ``int omega ^ omega' = 0``.  ``scale`` defaults to ``k = 1``."""
    basis = basis or homologyBasis(S)
    w = periods(S, basis)
    if scale is not None:
        w = [scale * z for z in w]
    pre = _as_ki(wedge_integral(basis, w, [z.conj() for z in w]), S.f)
    if pre:
        raise FluxPrecheckFailed(f"int omega ^ omega' = {pre}, expected 0")
    val = wedge_integral(basis, w, [z.cc().conj() for z in w])
    return -_as_ki(val, S.f)
