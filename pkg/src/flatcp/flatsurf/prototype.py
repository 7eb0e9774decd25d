"""The prototype family of Prym eigenforms in ``H(1,1,2)``.

For integers ``w, h, e`` with ``w > 0``, ``h > 0``, ``e + 2h < w``,
``gcd(w, h, e) = 1`` put ``D = e^2 + 8wh`` and ``lambda = (e + sqrt D)/2``.
The surface is one 16-gon: a ``lambda x lambda`` square with a
``(w/2) x (h/2)`` rectangle attached below its bottom-left corner and
another one above its top-right corner.  The horizontal saddle connection
``eta`` of length ``t`` sits on the bottom side of the square.

With ``W = w/2``, ``H = h/2`` and ``a = (lambda - t)/2`` the vertices are

    P0  (a-W, 0)      P1  (a-W, -H)     P2  (0, -H)       P3  (a, -H)
    P4  (a, 0)        P5  (a+t, 0)      P6  (lambda, 0)   P7  (lambda, lambda)
    P8  (lambda-a+W, lambda)            P9  (lambda-a+W, lambda+H)
    P10 (lambda, lambda+H)              P11 (lambda-a, lambda+H)
    P12 (lambda-a, lambda)              P13 (a, lambda)
    P14 (0, lambda)   P15 (0, 0)

and the Prym involution is the half-turn about ``(lambda/2, lambda/2)``,
sending ``P_i`` to ``P_{i+8}``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from ..exactnum import KNum, parse_knum, squarefree_part
from .homology import homologyBasis, intersection
from .surface import FlatSurface, SurfaceError, buildSurface

__all__ = [
    "PrototypeParams",
    "PrymStructure",
    "EndoMatrix",
    "prototypeP112",
    "prototype_polygon",
    "prototype_quotient",
    "kernelMove",
    "KERNEL_TEMPLATE",
    "kernel_epsilon",
    "MINUS_BASIS",
]

# gluings of the 16 sides, all by translation
_GLUINGS = [(0, 3), (1, 15), (2, 13), (4, 12), (5, 10), (6, 14), (7, 9), (8, 11)]

# change of each side vector under a kernel move by v (in units of v)
KERNEL_TEMPLATE = {
    "name": "prototype-P112",
    "coefficients": [
        [Fraction(c)]
        for c in ("0", "1/2", "-1/2", "0", "1", "-1/2", "0", "1/2", "0", "-1/2", "1/2", "0", "-1", "1/2", "0", "-1/2")
    ],
}

# the symplectic basis of H_1(X, Z)^- as side chains of polygon 0
MINUS_BASIS = {
    "alpha1": {(0, 15): 1, (0, 0): 1, (0, 1): 1, (0, 2): 1, (0, 3): 1, (0, 4): 1, (0, 5): 1},
    "beta1": {(0, k): 1 for k in range(5, 12)},
    "alpha2": {(0, 9): -1, (0, 10): -1, (0, 0): 1, (0, 1): 1, (0, 2): 1, (0, 3): 1},
    "beta2": {(0, 8): 1, (0, 0): -1},
}


@dataclass(frozen=True)
class PrototypeParams:
    """Validated parameters ``(w, h, e, t)`` with derived ``D`` and ``lambda``."""

    w: int
    h: int
    e: int
    t: KNum

    def __post_init__(self) -> None:
        w, h, e = self.w, self.h, self.e
        if w <= 0 or h <= 0:
            raise ValueError("w and h must be positive")
        if e + 2 * h >= w:
            raise ValueError(f"need e + 2h < w, got e + 2h = {e + 2 * h} and w = {w}")
        if gcd(gcd(w, h), e) != 1:
            raise ValueError("gcd(w, h, e) must be 1")
        t = parse_knum(self.t) if isinstance(self.t, str) else self.t
        if not isinstance(t, KNum):
            t = KNum(t, 0, self.field)
        if t.f not in (1, self.field):
            raise ValueError(f"t must lie in Q(sqrt {self.field})")
        t = KNum(t.a, t.b, self.field) if t.f != self.field else t
        object.__setattr__(self, "t", t)
        if not (0 < t < self.lam):
            raise ValueError("need 0 < t < lambda")

    @property
    def D(self) -> int:
        return self.e * self.e + 8 * self.w * self.h

    @property
    def field(self) -> int:
        return squarefree_part(self.D)[1]

    @property
    def lam(self) -> KNum:
        c, f = squarefree_part(self.D)
        return (KNum(self.e, 0, f) + KNum(0, c, f)) / 2

    def to_json(self) -> dict:
        return {"w": self.w, "h": self.h, "e": self.e, "t": str(self.t), "D": self.D, "lambda": str(self.lam)}


@dataclass(frozen=True)
class EndoMatrix:
    """Integer 4x4 matrix acting on row vectors of minus-basis coordinates."""

    rows: tuple[tuple[int, ...], ...]

    def to_json(self) -> list:
        return [list(r) for r in self.rows]


@dataclass(frozen=True)
class PrymStructure:
    involution: dict
    fixedPoints: tuple
    minusBasis: dict
    intersectionMatrix: tuple[tuple[int, ...], ...]

    def to_json(self) -> dict:
        return {
            "involution": [[list(a), list(b)] for a, b in sorted(self.involution.items())],
            "fixedPoints": [list(p) if isinstance(p, tuple) else p for p in self.fixedPoints],
            "minusBasis": [[k, [[p, e, c] for (p, e), c in sorted(v.items())]] for k, v in self.minusBasis.items()],
            "intersectionMatrix": [list(r) for r in self.intersectionMatrix],
        }


def prototype_polygon(params: PrototypeParams) -> list[tuple[KNum, KNum]]:
    lam, t = params.lam, params.t
    f = params.field
    W = KNum(Fraction(params.w, 2), 0, f)
    H = KNum(Fraction(params.h, 2), 0, f)
    a = (lam - t) / 2
    z = KNum(0, 0, f)
    return [
        (a - W, z), (a - W, -H), (z, -H), (a, -H),
        (a, z), (a + t, z), (lam, z), (lam, lam),
        (lam - a + W, lam), (lam - a + W, lam + H), (lam, lam + H), (lam - a, lam + H),
        (lam - a, lam), (a, lam), (z, lam), (z, z),
    ]  # fmt: skip


def _involution() -> dict:
    return {(0, i): (0, (i + 8) % 16) for i in range(16)}


def prototypeP112(params: PrototypeParams) -> tuple[FlatSurface, PrymStructure, EndoMatrix]:
    """Build the prototype surface, its Prym structure and the matrix ``T``."""
    poly = prototype_polygon(params)
    S = buildSurface([poly], [((0, i), (0, j), 1) for i, j in _GLUINGS], field=params.field, template=KERNEL_TEMPLATE, involution=_involution(), meta={"family": "prototype-P112", "params": params.to_json()})
    prym = prym_structure(S)
    w, h, e = params.w, params.h, params.e
    T = EndoMatrix(((e, 0, w, 0), (0, e, 0, h), (2 * h, 0, 0, 0), (0, 2 * w, 0, 0)))
    return S, prym, T


def prym_structure(S: FlatSurface) -> PrymStructure:
    basis = homologyBasis(S)
    names = ["alpha1", "beta1", "alpha2", "beta2"]
    Q = tuple(tuple(intersection(basis, MINUS_BASIS[a], MINUS_BASIS[b]) for b in names) for a in names)
    return PrymStructure(_involution(), _fixed_points(S), dict(MINUS_BASIS), Q)


def _fixed_points(S: FlatSurface) -> tuple:
    """Fixed points of the half-turn: the centre of the square, the midpoints
    of the two sides glued to their own image, and the fixed vertex class."""
    inv = S.involution
    pts: list = ["centre"]
    for side, (other, _tag) in sorted(S.gluings.items()):
        if inv[side] == other and side < other:
            pts.append(("midpoint", side[1]))
    for c, group in enumerate(S.vertex_classes):
        images = {S.class_index(p, (i + 8) % 16) for p, i in group}
        if images == {c}:
            pts.append(("vertex", c))
    return tuple(pts)


def kernel_epsilon(S: FlatSurface) -> KNum:
    """A quarter of the smallest sup-norm of a side moved by the template."""
    from .geometry import linf

    coeffs = S.template["coefficients"]
    vals = [linf(S.side_vector(0, i)) for i in range(len(S.polygons[0])) if coeffs[i][0]]
    return min(vals) / 4


def kernelMove(S: FlatSurface, v) -> FlatSurface:
    """Move the zeros exchanged by the involution by ``-v/2`` and ``+v/2``
    along the kernel foliation, keeping every absolute period."""
    if S.template is None:
        raise SurfaceError("kernel moves need a registered template")
    from .surface import _as_k
    from .geometry import linf

    f = S.f
    v = (_as_k(v[0], f), _as_k(v[1], f))
    eps = kernel_epsilon(S)
    if not linf(v) < eps:
        raise SurfaceError(f"move exceeds the template bound {eps}")
    coeffs = S.template["coefficients"]
    poly = S.polygons[0]
    n = len(poly)
    pts = [poly[0]]
    for i in range(n - 1):
        c = coeffs[i][0]
        sv = S.side_vector(0, i)
        pts.append((pts[-1][0] + sv[0] + v[0] * c, pts[-1][1] + sv[1] + v[1] * c))
    polys = [pts] + [list(p) for p in S.polygons[1:]]
    return buildSurface(polys, [(a, b, t) for a, b, t in S.edges], field=f, template=S.template, involution=S.involution, meta=S.meta)


def prototype_quotient(params: PrototypeParams) -> FlatSurface:
    """The quotient by the Prym involution, a half-translation surface in
    ``Q(-1^3, 1, 2)``: the half of the 16-gon above the anti-diagonal of
    the square, with the cut and the self-glued sides folded."""
    P = prototype_polygon(params)
    lam = params.lam
    centre = (lam / 2, lam / 2)
    poly = [
        P[6], (lam, lam / 2), P[7], P[8], P[9], P[10], P[11], P[12],
        (lam / 2, lam), P[13], P[14], centre,
    ]  # fmt: skip
    glue = [(0, 1, -1), (2, 4, 1), (3, 6, 1), (5, 9, -1), (7, 8, -1), (10, 11, -1)]
    return buildSurface([poly], [((0, i), (0, j), t) for i, j, t in glue], field=params.field, meta={"family": "prototype-P112-quotient", "params": params.to_json()})
