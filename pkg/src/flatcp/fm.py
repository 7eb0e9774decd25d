"""Exact Fourier-Motzkin elimination for small systems mixing strict
inequalities, weak inequalities and equalities.

Coefficients may be rationals or elements of an ordered field such as
:class:`~flatcp.exactnum.KNum`; only field operations and comparisons are
used.

A constraint ``(a, b, op)`` reads ``sum(a[i] * x[i]) op b`` with ``op`` one
of ``">"``, ``">="`` or ``"="``.  :func:`solve` returns a rational point
satisfying all constraints, or ``None`` when the system is infeasible.

    >>> from fractions import Fraction
    >>> solve([((1, 0), 0, ">"), ((0, 1), 0, ">"), ((1, 1), 1, "<")], 2)
    [Fraction(1, 2), Fraction(1, 4)]
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

__all__ = ["Constraint", "solve", "feasible"]

Constraint = tuple[Sequence, object, str]


def _normalise(cons: Iterable[Constraint], n: int) -> list[tuple[tuple[Fraction, ...], Fraction, bool]]:
    """Turn inequalities into rows ``(a, b, strict)`` meaning ``a.x > b``
    (or ``a.x >= b`` when not strict)."""
    rows = []
    for a, b, op in cons:
        a = tuple(_num(v) for v in a)
        b = _num(b)
        if len(a) != n:
            raise ValueError("coefficient vector has the wrong length")
        if op in ("<", "<="):
            a = tuple(-v for v in a)
            b = -b
        elif op not in (">", ">="):
            raise ValueError(f"unexpected operator {op!r}")
        rows.append((a, b, op in ("<", ">")))
    return rows


def _num(v):
    """Rationals become :class:`Fraction`; other field elements pass through."""
    return Fraction(v) if isinstance(v, (int, Fraction)) else v


def _scale(a: tuple, b) -> tuple[tuple, object]:
    """Divide a row by the absolute value of its first non-zero coefficient."""
    lead = next(v for v in a if v)
    c = lead if lead > 0 else -lead
    return tuple(v / c for v in a), b / c


def solve(constraints: Iterable[Constraint], n: int) -> list[Fraction] | None:
    """A rational solution of the system, chosen deterministically."""
    cons = list(constraints)
    eqs = [(tuple(_num(v) for v in a), _num(b)) for a, b, op in cons if op == "="]
    ineqs = [c for c in cons if c[2] != "="]

    # Gaussian elimination of the equalities: x_p = (b - sum_{j != p} a_j x_j) / a_p
    subst: list[tuple[int, tuple[Fraction, ...], Fraction]] = []
    pending = list(eqs)
    while pending:
        a, b = pending.pop()
        for p, pa, pb in subst:
            if a[p]:
                c = a[p]
                a = tuple(ai - c * pai for ai, pai in zip(a, pa))
                b = b - c * pb
        piv = next((i for i, v in enumerate(a) if v), None)
        if piv is None:
            if b != 0:
                return None
            continue
        c = a[piv]
        a = tuple(v / c for v in a)
        b = b / c
        # keep earlier substitutions in reduced form
        new_subst = []
        for p, pa, pb in subst:
            k = pa[piv]
            if k:
                pa = tuple(x - k * y for x, y in zip(pa, a))
                pb = pb - k * b
            new_subst.append((p, pa, pb))
        subst = new_subst + [(piv, a, b)]

    pivots = {p for p, _, _ in subst}
    free = [i for i in range(n) if i not in pivots]

    def expand(a: tuple[Fraction, ...], b: Fraction) -> tuple[tuple[Fraction, ...], Fraction]:
        """Rewrite ``a.x`` in terms of the free variables only."""
        a = list(a)
        for p, pa, pb in subst:
            c = a[p]
            if c:
                # x_p = pb - sum_{j != p} pa_j x_j
                for j in range(n):
                    if j != p:
                        a[j] -= c * pa[j]
                a[p] = Fraction(0)
                b = b - c * pb
        return tuple(a[i] for i in free), b

    rows = []
    for a, b, op in _normalise(ineqs, n):
        fa, fb = expand(a, b)
        rows.append((fa, fb, op))

    point = _fm_solve(rows, len(free))
    if point is None:
        return None
    x = [Fraction(0)] * n
    for i, v in zip(free, point):
        x[i] = v
    for p, pa, pb in subst:
        x[p] = pb - sum((pa[j] * x[j] for j in range(n) if j != p), Fraction(0))
    return x


def _fm_solve(rows, n: int) -> list[Fraction] | None:
    """Solve ``a.x > b`` / ``a.x >= b`` rows over ``n`` variables."""
    stages = []
    current = _dedupe(rows)
    for k in range(n - 1, -1, -1):
        stages.append(current)
        lower, upper, rest = [], [], []
        for a, b, strict in current:
            if a[k] > 0:
                lower.append((a, b, strict))
            elif a[k] < 0:
                upper.append((a, b, strict))
            else:
                rest.append((a, b, strict))
        combined = list(rest)
        for al, bl, sl in lower:
            for au, bu, su in upper:
                cl, cu = al[k], -au[k]
                a = tuple(cu * x + cl * y for x, y in zip(al, au))
                b = cu * bl + cl * bu
                combined.append((a, b, sl or su))
        current = _dedupe(combined)
    # all variables gone: every row reads 0 > b or 0 >= b
    if any(_violated(b, strict) for _, b, strict in current):
        return None
    x = [Fraction(0)] * n
    for k, stage in zip(range(n), reversed(stages)):
        lo = hi = None
        for a, b, _ in stage:
            c = a[k]
            if c == 0:
                continue
            bound = (b - sum((a[j] * x[j] for j in range(k)), Fraction(0))) / c
            if c > 0:
                lo = bound if lo is None else max(lo, bound)
            else:
                hi = bound if hi is None else min(hi, bound)
        if lo is not None and hi is not None:
            x[k] = (lo + hi) / 2
        elif lo is not None:
            x[k] = lo + 1
        elif hi is not None:
            x[k] = hi - 1
        else:
            x[k] = Fraction(0)
    return x


def _violated(b: Fraction, strict: bool) -> bool:
    """Whether the variable-free row ``0 > b`` (or ``0 >= b``) fails."""
    return not (0 > b) if strict else not (0 >= b)


def _dedupe(rows):
    """Drop trivially true rows and keep only the tightest row per direction."""
    best: dict[tuple, tuple[Fraction, bool]] = {}
    failing = []
    for a, b, strict in rows:
        if not any(a):
            if _violated(b, strict):
                failing.append((a, b, strict))
            continue
        a, b = _scale(a, b)
        prev = best.get(a)
        if prev is None or b > prev[0] or (b == prev[0] and strict):
            best[a] = (b, strict)
    return [(a, b, s) for a, (b, s) in best.items()] + failing[:1]


def feasible(constraints: Iterable[Constraint], n: int) -> bool:
    return solve(constraints, n) is not None
