"""Real multiplication checks, flux identities for cylinder decompositions,
commensurability of moduli and the modulus-ratio tuning of kernel moves."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm
from typing import Sequence

from ..exactnum import KiNum, KNum, squarefree_part
from .flow import CylinderDecomposition, cylinderDecomposition, direction_similarity
from .homology import complexFlux, homologyBasis, period_of_chain
from .surface import FlatSurface

__all__ = [
    "EigenReport",
    "checkEigenform",
    "IdentityReport",
    "cylinderIdentities",
    "identities_for",
    "Commensurability",
    "commensurability",
    "tuneKernelParameter",
]


@dataclass
class EigenReport:
    passed: bool
    checks: dict = field(default_factory=dict)
    e: int | None = None
    c: int | None = None
    eigenvalue: KNum | None = None
    failure: str | None = None

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "checks": self.checks,
            "e": self.e,
            "c": self.c,
            "eigenvalue": None if self.eigenvalue is None else str(self.eigenvalue),
            "failure": self.failure,
        }


def _matmul(a, b):
    n, m, k = len(a), len(b[0]), len(b)
    return [[sum(a[i][r] * b[r][j] for r in range(k)) for j in range(m)] for i in range(n)]


def _transpose(a):
    return [list(r) for r in zip(*a)]


def checkEigenform(S: FlatSurface, prym, T, D: int) -> EigenReport:
    """Verify that ``T`` (acting on row vectors of minus-basis coordinates)
    is real multiplication by the order of discriminant ``D`` with the
    period vector of ``dz`` as eigenvector.

    The four checks are: self-adjointness ``T Q = Q T^t`` for the
    intersection matrix ``Q``; a quadratic relation ``T^2 = eT + c Id`` with
    ``e^2 + 4c = D``; content 1, meaning the off-diagonal entries and the
    diagonal differences of ``T`` have gcd 1; and ``p T = lambda p`` for the
    period row vector ``p`` with ``lambda = (e + sqrt D)/2``.
    """
    rows = [list(r) for r in (T.rows if hasattr(T, "rows") else T)]
    n = len(rows)
    Q = [list(r) for r in prym.intersectionMatrix]
    rep = EigenReport(passed=False)

    TQ = _matmul(rows, Q)
    QTt = _matmul(Q, _transpose(rows))
    rep.checks["selfAdjoint"] = TQ == QTt
    if not rep.checks["selfAdjoint"]:
        rep.failure = "T Q != Q T^t"

    T2 = _matmul(rows, rows)
    off = [(i, j) for i in range(n) for j in range(n) if i != j and rows[i][j]]
    e = c = None
    if off:
        i, j = off[0]
        if T2[i][j] % rows[i][j] == 0:
            e = T2[i][j] // rows[i][j]
    elif len({rows[i][i] for i in range(n)}) == 2:
        x, y = sorted({rows[i][i] for i in range(n)})
        e = x + y
    elif n:
        e = 2 * rows[0][0]
    quad = False
    if e is not None:
        c = T2[0][0] - e * rows[0][0]
        quad = all(T2[i][j] - e * rows[i][j] == (c if i == j else 0) for i in range(n) for j in range(n))
    rep.checks["quadratic"] = quad and e * e + 4 * c == D
    rep.e, rep.c = e, c
    if not rep.checks["quadratic"] and rep.failure is None:
        rep.failure = "no relation T^2 = eT + c Id with e^2 + 4c = D"

    content = 0
    for i in range(n):
        for j in range(n):
            if i != j:
                content = gcd(content, rows[i][j])
        content = gcd(content, rows[i][i] - rows[0][0])
    rep.checks["proper"] = content == 1
    if not rep.checks["proper"] and rep.failure is None:
        rep.failure = f"content of T - a Id is {content}, not 1"

    eig = False
    if rep.checks["quadratic"] and D > 0:
        r, f = squarefree_part(D)
        if f == S.f or f == 1:
            lam = (KNum(e, 0, S.f) + KNum(0, r, f) if f != 1 else KNum(e + r, 0, S.f)) / 2
            lam = KNum(lam.a, lam.b, S.f) if lam.f != S.f else lam
            rep.eigenvalue = lam
            names = list(prym.minusBasis)
            p = [period_of_chain(S, prym.minusBasis[k]) for k in names]
            pT = [sum((p[i] * rows[i][j] for i in range(n)), KiNum(0, 0, S.f)) for j in range(n)]
            eig = all(pT[j] == p[j] * lam for j in range(n))
    rep.checks["eigenvector"] = eig
    if not eig and rep.failure is None:
        rep.failure = "period vector is not an eigenvector of T"
    rep.passed = all(rep.checks.values())
    return rep


@dataclass
class IdentityReport:
    """Residuals of the flux identities; each identity passes when its
    residual is exactly zero."""

    flux: KiNum
    residuals: dict

    @property
    def passed(self) -> dict:
        return {k: not v for k, v in self.residuals.items()}

    def to_json(self) -> dict:
        return {
            "flux": str(self.flux),
            "residuals": {k: str(v) for k, v in self.residuals.items()},
            "passed": self.passed,
        }


def cylinderIdentities(decomp: CylinderDecomposition, flux: KiNum) -> IdentityReport:
    """Compare a cylinder decomposition with the complex flux of the
    normalised surface.

    ``fluxHeights``: ``sum h_j w_j' - Im(Flux)/2``.
    ``moduli``: ``sum mu_j N(w_j) - Im(Flux)/2``.
    ``calta``: ``sum w_j h_j' - (Im(Flux)/2)'``.
    """
    half = flux.im / 2
    f = flux.f
    s_hw = sum((c.h * c.w.conj() for c in decomp.cylinders), KNum(0, 0, f))
    s_mu = sum((c.mu * c.w.norm() for c in decomp.cylinders), KNum(0, 0, f))
    s_wh = sum((c.w * c.h.conj() for c in decomp.cylinders), KNum(0, 0, f))
    return IdentityReport(
        flux,
        {"fluxHeights": s_hw - half, "moduli": s_mu - half, "calta": s_wh - half.conj()},
    )


def identities_for(S: FlatSurface, direction=(0, 1), budget: int = 1000) -> tuple[CylinderDecomposition, IdentityReport]:
    """Decompose in ``direction`` and evaluate the identities against the
    flux of the normalised surface."""
    decomp = cylinderDecomposition(S, direction, budget)
    dirk = decomp.direction
    N = S.transform(direction_similarity(dirk, S.f))
    return decomp, cylinderIdentities(decomp, complexFlux(N, homologyBasis(N)))


@dataclass
class Commensurability:
    commensurable: bool
    ratios: list = field(default_factory=list)
    multiplier: KNum | None = None
    twists: list = field(default_factory=list)
    witness: tuple | None = None

    def to_json(self) -> dict:
        return {
            "commensurable": self.commensurable,
            "ratios": [str(r) for r in self.ratios],
            "multiplier": None if self.multiplier is None else str(self.multiplier),
            "twists": self.twists,
            "witness": None if self.witness is None else list(self.witness),
        }


def commensurability(decomp: CylinderDecomposition | Sequence[KNum]) -> Commensurability:
    """Exact modulus ratios against the first cylinder.

    When all ratios ``r_i`` are rational, ``L = lcm(denominators)`` gives the
    shear ``s = L / mu_1`` that twists cylinder ``i`` exactly ``L r_i``
    times.  Otherwise the first irrational pair is returned as witness.
    """
    mus = [c.mu for c in decomp.cylinders] if hasattr(decomp, "cylinders") else list(decomp)
    ratios = []
    for i, m in enumerate(mus):
        r = m / mus[0]
        if r.b:
            return Commensurability(False, ratios, witness=(0, i, str(r)))
        ratios.append(r.a)
    L = 1
    for r in ratios:
        L = lcm(L, Fraction(r).denominator)
    twists = [int(L * r) for r in ratios]
    return Commensurability(True, [Fraction(r) for r in ratios], L / mus[0], twists)


def tuneKernelParameter(
    heights: Sequence,
    widths: Sequence,
    slopes: Sequence,
    q=None,
    pair: tuple[int, int] | None = None,
    max_den: int = 12,
) -> KNum:
    """Solve ``R_ij(t) = q`` for the ratio of moduli
    ``R_ij(t) = ((h_i + a_i t)/w_i) / ((h_j + a_j t)/w_j)``.

    ``slopes`` are the coefficients ``a_i`` in ``{-1, -1/2, 0, 1/2, 1}``.
    Without ``q`` the rationals of denominator at most ``max_den`` nearest to
    ``R_ij(0)`` are tried and the admissible ``t`` (all heights positive) of
    smallest height is returned.
    """
    a = [Fraction(x) for x in slopes]
    if pair is None:
        pair = next(((i, j) for i in range(len(a)) for j in range(i + 1, len(a)) if a[i] != a[j]), None)
        if pair is None:
            raise ValueError("all slopes a_i are equal; no modulus ratio can be tuned")
    i, j = pair
    if a[i] == a[j]:
        raise ValueError("the chosen cylinders have equal slopes")
    f = max([x.f for x in list(heights) + list(widths) if isinstance(x, KNum)] + [1])
    h = [x if isinstance(x, KNum) else KNum(x, 0, f) for x in heights]
    w = [x if isinstance(x, KNum) else KNum(x, 0, f) for x in widths]

    def solve(qq: Fraction) -> KNum | None:
        den = a[i] * w[j] - w[i] * a[j] * qq
        if not den:
            return None
        return (w[i] * h[j] * qq - h[i] * w[j]) / den

    def admissible(t: KNum) -> bool:
        return all((h[k] + t * a[k]).sign() > 0 for k in range(len(h)))

    if q is not None:
        t = solve(Fraction(q))
        if t is None:
            raise ValueError("the ratio cannot reach the requested value")
        return t

    r0 = float(h[i] * w[j] / (w[i] * h[j]))
    cands = set()
    for den in range(1, max_den + 1):
        num = round(r0 * den)
        for k in (num - 1, num, num + 1):
            if k > 0:
                cands.add(Fraction(k, den))
    best = None
    for qq in sorted(cands, key=lambda x: (abs(float(x) - r0), x.denominator)):
        t = solve(qq)
        if t is None or not t or not admissible(t):
            continue
        key = (_height(t), abs(float(t)))
        if best is None or key < best[0]:
            best = (key, t)
    if best is None:
        raise ValueError("no admissible parameter found")
    return best[1]


def _height(x: KNum) -> int:
    vals = [x.a, x.b]
    return max(max(abs(v.numerator), v.denominator) for v in vals)
