"""Direct orbit simulation of linear involutions with lengths in Z[sqrt 5].

Independent of the library's induction code: points are pairs of integers
``(a, b)`` standing for ``a + b sqrt 5`` after clearing denominators, and the
map is applied literally from the rows and the lengths.
"""

from __future__ import annotations

import math
from fractions import Fraction


def _positive(a: int, b: int) -> bool:
    """``a + b sqrt 5 > 0`` for integers ``a`` and ``b``."""
    if a >= 0 and b >= 0:
        return a > 0 or b > 0
    if a <= 0 and b <= 0:
        return False
    return a * a > 5 * b * b if a > 0 else 5 * b * b > a * a


def _less(u, v) -> bool:
    return _positive(v[0] - u[0], v[1] - u[1])


class Orbit:
    def __init__(self, T, scale: int = 6):
        den = 1
        for v in T.lengths.values():
            den = math.lcm(den, Fraction(v.a).denominator, Fraction(v.b).denominator)
        den *= scale
        self.rows = T.perm.rows
        self.len = {s: (int(Fraction(v.a) * den), int(Fraction(v.b) * den)) for s, v in T.lengths.items()}
        self.starts = []
        for row in self.rows:
            acc, st = (0, 0), []
            for s in row:
                st.append(acc)
                acc = (acc[0] + self.len[s][0], acc[1] + self.len[s][1])
            self.starts.append(st)
        self.occ: dict = {}
        for r, row in enumerate(self.rows):
            for i, s in enumerate(row):
                self.occ.setdefault(s, []).append((r, i))

    def step(self, x, r):
        """Image of ``(x, r)``, or ``None`` when ``x`` is an endpoint."""
        for i, s in enumerate(self.rows[r]):
            a = self.starts[r][i]
            n = self.len[s]
            b = (a[0] + n[0], a[1] + n[1])
            if x in (a, b):
                return None
            if _less(a, x) and _less(x, b):
                break
        else:
            return None
        (r0, i0), (r1, i1) = self.occ[s]
        tr, ti = (r1, i1) if (r0, i0) == (r, i) else (r0, i0)
        t = self.starts[tr][ti]
        off = (x[0] - a[0], x[1] - a[1])
        if tr != r:
            y = (t[0] + off[0], t[1] + off[1])
        else:
            y = (t[0] + n[0] - off[0], t[1] + n[1] - off[1])
        return y, 1 - tr

    def closes(self, x, r, cap: int):
        """``True`` if the orbit returns, ``False`` if not within ``cap``
        steps, ``None`` if it hits an endpoint."""
        y, rr = x, r
        for _ in range(cap):
            nxt = self.step(y, rr)
            if nxt is None:
                return None
            y, rr = nxt
            if y == x and rr == r:
                return True
        return False

    def all_close(self, cap: int = 300) -> bool:
        """Orbits of the 1/2 and 1/3 points of every subinterval all close."""
        for r, row in enumerate(self.rows):
            for i, s in enumerate(row):
                a, n = self.starts[r][i], self.len[s]
                for num, den in ((1, 2), (1, 3)):
                    x = (a[0] + n[0] * num // den, a[1] + n[1] * num // den)
                    if self.closes(x, r, cap) is False:
                        return False
        return True
