"""Suspensions of generalized permutations and the strata they realise.

A suspension datum assigns to each symbol ``alpha`` a vector
``zeta_alpha = (lambda_alpha, tau_alpha)``.  Reading the top row from left
to right and summing the ``zeta`` gives the top broken line; the bottom row
gives the bottom broken line; both start at the origin and end at the same
point.  A datum is admissible when the interior vertices of the top line lie
strictly above the real axis and those of the bottom line strictly below.
Such a datum exists exactly for irreducible generalized permutations.

The polygon bounded by the two broken lines is glued along same-symbol
sides: by a translation when the two occurrences lie in different rows and
by a half-turn when they lie in the same row.  Whenever possible the data
returned here also close both lines on the real axis (``sum tau = 0``), so
both lines stay on their own side of the segment ``[0, L]`` and the vertical
first return to that segment recovers the involution.  Otherwise the heights
are chosen so that the top line stays above the bottom line, which keeps the
polygon simple.

    >>> from flatcp.involutions import GenPerm
    >>> g = GenPerm.parse("A B / B A")
    >>> data = findSuspensionData(g, {"A": 1, "B": 1})
    >>> [str(data.tau[s]) for s in "AB"]
    ['1', '-1']
    >>> stratumOf(g)
    'H(0)'
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from . import fm
from .exactnum import KNum
from .flatsurf.flow import CrossSection, crossSection, horizontal_transversal
from .flatsurf.surface import FlatSurface, buildSurface
from .involutions import GenPerm, InvolutionError, LinearInvolution, irreducible

__all__ = [
    "SuspensionData",
    "SuspensionInfeasible",
    "suspension_constraints",
    "findSuspensionData",
    "suspend",
    "stratumOf",
    "roundTrip",
    "generic_lengths",
]


class SuspensionInfeasible(InvolutionError):
    """No admissible suspension datum exists (the permutation is reducible)."""


@dataclass(frozen=True)
class SuspensionData:
    """Exact lengths in ``K`` and rational heights for each symbol."""

    perm: GenPerm
    lengths: Mapping[str, KNum]
    tau: Mapping[str, Fraction]

    def zeta(self, symbol: str) -> tuple[KNum, KNum]:
        lam = self.lengths[symbol]
        return lam, KNum(self.tau[symbol], 0, lam.f)

    def partial_sums(self, row: int) -> list[Fraction]:
        """Heights of the vertices of the broken line of ``row``."""
        out = [Fraction(0)]
        for s in self.perm.rows[row]:
            out.append(out[-1] + self.tau[s])
        return out

    def check(self) -> None:
        top, bottom = self.partial_sums(0), self.partial_sums(1)
        if top[-1] != bottom[-1]:
            raise SuspensionInfeasible("the broken lines end at different heights")
        if any(y <= 0 for y in top[1:-1]) or any(y >= 0 for y in bottom[1:-1]):
            raise SuspensionInfeasible("broken lines cross the real axis")

    def to_json(self) -> dict:
        return {
            "perm": str(self.perm),
            "lengths": {s: str(v) for s, v in self.lengths.items()},
            "tau": {s: str(v) for s, v in self.tau.items()},
        }


def suspension_constraints(g: GenPerm, closed: bool = False) -> list[fm.Constraint]:
    """Strict inequalities on ``tau`` (indexed by ``g.alphabet``).

    Interior top partial sums are positive, interior bottom partial sums
    negative, and the two rows have equal total.  With ``closed`` both totals
    are also required to vanish.
    """
    names = g.alphabet
    pos = {s: i for i, s in enumerate(names)}
    n = len(names)
    cons: list[fm.Constraint] = []

    def prefix(row: tuple[str, ...], k: int) -> list[int]:
        a = [0] * n
        for s in row[:k]:
            a[pos[s]] += 1
        return a

    for k in range(1, len(g.top)):
        cons.append((prefix(g.top, k), 0, ">"))
    for k in range(1, len(g.bottom)):
        cons.append((prefix(g.bottom, k), 0, "<"))
    top_all = prefix(g.top, len(g.top))
    bottom_all = prefix(g.bottom, len(g.bottom))
    cons.append(([a - b for a, b in zip(top_all, bottom_all)], 0, "="))
    if closed:
        cons.append((top_all, 0, "="))
    return cons


def _lengths(g: GenPerm, lengths: Mapping[str, object]) -> dict[str, KNum]:
    return dict(LinearInvolution(g, dict(lengths)).lengths)


def findSuspensionData(g: GenPerm, lengths: Mapping[str, object] | None = None) -> SuspensionData:
    """An admissible datum with rational heights, or :class:`SuspensionInfeasible`.

    The heights come from Fourier-Motzkin elimination of the strict system
    with both lines closed on the real axis.  When lengths are omitted,
    :func:`generic_lengths` supplies positive rational ones.
    """
    lam = _lengths(g, lengths if lengths is not None else generic_lengths(g))
    names = g.alphabet
    sol = fm.solve(suspension_constraints(g, closed=True), len(names))
    if sol is None:
        base = suspension_constraints(g)
        if not fm.feasible(base, len(names)):
            raise SuspensionInfeasible(f"{g} is reducible: the suspension inequalities are infeasible")
        # the lines cannot both close on the axis: keep the top line above
        # the bottom one at every break point instead
        cons = base + _separation_constraints(g, lam)
        sol = fm.solve(cons, len(names))
        if sol is None:
            raise SuspensionInfeasible(f"{g}: no suspension with a simple polygon for these lengths")
        sol = _rationalise(sol, cons)
    data = SuspensionData(g, lam, {s: sol[i] for i, s in enumerate(names)})
    data.check()
    return data


def _separation_constraints(g: GenPerm, lam: Mapping[str, KNum]) -> list[fm.Constraint]:
    """``top(x) > bottom(x)`` at every interior break point ``x`` of either
    line, which makes the polygon simple."""
    names = g.alphabet
    pos = {s: i for i, s in enumerate(names)}
    n = len(names)
    f = lam[names[0]].f

    def breaks(row):
        xs, acc = [], KNum(0, 0, f)
        for s in row[:-1]:
            acc = acc + lam[s]
            xs.append(acc)
        return xs

    def height(row, x) -> list:
        """Coefficients of the height of the broken line of ``row`` above ``x``."""
        a: list = [0] * n
        acc = KNum(0, 0, f)
        for s in row:
            nxt = acc + lam[s]
            if nxt <= x:
                a[pos[s]] += 1
            else:
                a[pos[s]] = a[pos[s]] + (x - acc) / lam[s]
                break
            acc = nxt
        return a

    cons: list[fm.Constraint] = []
    for x in sorted(set(breaks(g.top)) | set(breaks(g.bottom))):
        top, bottom = height(g.top, x), height(g.bottom, x)
        cons.append(([t - b for t, b in zip(top, bottom)], 0, ">"))
    return cons


def _satisfied(cons: list[fm.Constraint], x: list) -> bool:
    for a, b, op in cons:
        v = sum((c * xi for c, xi in zip(a, x)), Fraction(0)) - b
        if not ((v > 0) if op == ">" else (v < 0) if op == "<" else (v == 0)):
            return False
    return True


def _rationalise(sol: list, cons: list[fm.Constraint]) -> list[Fraction]:
    """Dyadic rationals near ``sol`` that still satisfy ``cons`` exactly.

    Each equality is restored by solving it for one of its variables.
    """
    exact = [Fraction(v) if isinstance(v, (int, Fraction)) else (v.a if not v.b else None) for v in sol]
    if all(v is not None for v in exact) and _satisfied(cons, exact):
        return exact
    eqs = [(a, b) for a, b, op in cons if op == "="]
    for bits in range(4, 200, 4):
        scale = 2**bits
        x = [Fraction(round(float(v) * scale), scale) for v in sol]
        for a, b in eqs:
            k = max(i for i, c in enumerate(a) if c)
            rest = sum((Fraction(c) * xi for i, (c, xi) in enumerate(zip(a, x)) if i != k), Fraction(0))
            x[k] = (Fraction(b) - rest) / Fraction(a[k])
        if _satisfied(cons, x):
            return x
    raise SuspensionInfeasible("could not find rational heights")


def generic_lengths(g: GenPerm) -> dict[str, Fraction]:
    """Positive rational lengths with equal row sums, or an error.

    Solved by Fourier-Motzkin elimination; deterministic in ``g``.
    """
    names = g.alphabet
    n = len(names)
    pos = {s: i for i, s in enumerate(names)}
    row_diff = [0] * n
    for s in g.top:
        row_diff[pos[s]] += 1
    for s in g.bottom:
        row_diff[pos[s]] -= 1
    cons: list[fm.Constraint] = [([int(i == j) for j in range(n)], 0, ">") for i in range(n)]
    cons.append((row_diff, 0, "="))
    sol = fm.solve(cons, n)
    if sol is None:
        raise SuspensionInfeasible(f"{g} admits no positive lengths")
    return {s: sol[pos[s]] for s in names}


def suspend(g: GenPerm, lengths: Mapping[str, object] | None = None, data: SuspensionData | None = None) -> FlatSurface:
    """The polygon bounded by the two broken lines with its side gluings.

    Side ``k`` for ``k < len(bottom)`` is the ``k``-th bottom segment; the
    remaining sides run along the top line from right to left.
    """
    if data is None:
        data = findSuspensionData(g, lengths)
    data.check()
    f = max(v.f for v in data.lengths.values())
    z = KNum(0, 0, f)
    pts = [(z, z)]
    for s in g.bottom:
        lam, tau = data.zeta(s)
        pts.append((pts[-1][0] + lam, pts[-1][1] + tau))
    top_pts = [(z, z)]
    for s in g.top:
        lam, tau = data.zeta(s)
        top_pts.append((top_pts[-1][0] + lam, top_pts[-1][1] + tau))
    if top_pts[-1] != pts[-1]:
        raise SuspensionInfeasible("broken lines do not close up")
    polygon = pts[:-1] + list(reversed(top_pts[1:]))
    if len(polygon) < 3:
        raise SuspensionInfeasible("a single symbol gives a degenerate polygon")
    nb, nt = len(g.bottom), len(g.top)
    side: dict[tuple[int, int], int] = {}
    for k in range(nb):
        side[(1, k)] = k
    for k in range(nt):
        side[(0, k)] = nb + (nt - 1 - k)
    gluings = []
    for s in g.alphabet:
        (r0, i0), (r1, i1) = g.occurrences(s)
        tag = 1 if r0 != r1 else -1
        gluings.append(((0, side[(r0, i0)]), (0, side[(r1, i1)]), tag))
    return buildSurface(
        [polygon],
        gluings,
        field=f,
        meta={"family": "suspension", "perm": str(g), "tau": {s: str(t) for s, t in data.tau.items()}},
    )


def stratumOf(g: GenPerm, lengths: Mapping[str, object] | None = None) -> str:
    """Name of the stratum containing the suspensions of ``g``.

    Raises :class:`SuspensionInfeasible` for reducible ``g``.
    """
    if not irreducible(g):
        raise SuspensionInfeasible(f"{g} is reducible")
    return suspend(g, lengths).stratum_name()


def roundTrip(g: GenPerm, lengths: Mapping[str, object] | None = None, data: SuspensionData | None = None, budget: int = 10_000) -> CrossSection:
    """Suspend and take the vertical first return to the segment ``[0, L]``
    joining the two ends of the broken lines.  Every vertex counts as a
    marked point.

    Only data closing both lines on the real axis put that segment inside
    the polygon; when the inequalities force unequal signs on the row totals
    (for instance a row ``A A``) this raises :class:`SuspensionInfeasible`.
    """
    S = suspend(g, lengths, data)
    end = S.polygons[0][len(g.bottom)]
    if end[1]:
        raise SuspensionInfeasible(f"{g}: the broken lines cannot both end on the real axis")
    return crossSection(S, horizontal_transversal(S, 0, (0, 0), end[0]), budget, marked=True)
