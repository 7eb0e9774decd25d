"""Orientation double cover of a half-translation surface.

Each polygon ``P`` gets two copies: copy 0 is ``P`` itself and copy 1 is
``-P`` (rotated by a half-turn, so still counter-clockwise).  A side glued by
a translation stays glued inside each copy.  A side glued by a half-turn is
glued to its partner in the other copy, where the half-turn of the copy
turns the gluing into a translation.  The deck involution exchanges the
copies; it acts by ``-Id`` in the charts.
"""

from __future__ import annotations

from fractions import Fraction

from .homology import chain_coordinates, homologyBasis
from .surface import FlatSurface, buildSurface

__all__ = ["orientationDoubleCover", "deck_action", "minus_rank", "euler_characteristic"]


def orientationDoubleCover(S: FlatSurface) -> tuple[FlatSurface, dict]:
    """The translation surface ``(X, omega)`` with ``omega^2`` pulling back
    the quadratic differential of ``S``, and its deck involution as a map
    of sides ``(p, e) -> (p', e)``.

    A translation surface has a disconnected cover; in that case ``S``
    itself (one component) is returned with the identity map.
    """
    n = len(S.polygons)
    if S.is_translation:
        return S, {side: side for side in S.sides()}
    polys = [list(P) for P in S.polygons] + [[(-x, -y) for x, y in P] for P in S.polygons]
    gluings = []
    for a, b, tag in S.edges:
        (p, e), (q, g) = a, b
        if tag == 1:
            gluings.append(((p, e), (q, g), 1))
            gluings.append(((p + n, e), (q + n, g), 1))
        else:
            gluings.append(((p, e), (q + n, g), 1))
            gluings.append(((p + n, e), (q, g), 1))
    deck = {}
    for p, P in enumerate(S.polygons):
        for e in range(len(P)):
            deck[(p, e)] = (p + n, e)
            deck[(p + n, e)] = (p, e)
    meta = dict(S.meta or {})
    meta["cover_of"] = S.stratum_name()
    X = buildSurface(polys, gluings, field=S.f, involution=deck, meta=meta)
    return X, deck


def euler_characteristic(S: FlatSurface) -> int:
    """``V - E + F`` of the polygonal cell structure."""
    return len(S.vertex_classes) - len(S.edges) + len(S.polygons)


def deck_action(X: FlatSurface, deck: dict, basis=None) -> list[list[Fraction]]:
    """Matrix of the deck involution on ``H_1(X)`` in the tree-cotree basis;
    row ``k`` holds the coordinates of the image of basis cycle ``k``."""
    basis = basis or homologyBasis(X)
    rows = []
    for cyc in basis.cycles:
        chain: dict = {}
        for k, c in enumerate(cyc):
            if c:
                side = deck[X.edges[k][0]]
                chain[side] = chain.get(side, 0) + c
        rows.append(chain_coordinates(basis, chain))
    return rows


def _rank(m: list[list[Fraction]]) -> int:
    a = [list(r) for r in m]
    rank = 0
    cols = len(a[0]) if a else 0
    for c in range(cols):
        piv = next((r for r in range(rank, len(a)) if a[r][c]), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        for r in range(len(a)):
            if r != rank and a[r][c]:
                k = a[r][c] / a[rank][c]
                a[r] = [x - k * y for x, y in zip(a[r], a[rank])]
        rank += 1
    return rank


def minus_rank(X: FlatSurface, deck: dict) -> int:
    """Dimension of the ``-1`` eigenspace of the deck involution on homology."""
    M = deck_action(X, deck)
    n = len(M)
    return n - _rank([[M[i][j] + (1 if i == j else 0) for j in range(n)] for i in range(n)])
