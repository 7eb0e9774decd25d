"""Generalized permutations and linear involutions with exact lengths.

A linear involution lives on two copies ``I x {0, 1}`` of an interval
``I = [0, L)``.  Row 0 (the *top*) and row 1 (the *bottom*) are each cut
into consecutive labelled subintervals; every label occurs exactly twice in
total.  A point ``(x, e)`` in a subinterval is sent to the matching point of
its twin subinterval (by a translation when the twin sits in the other row,
by a flip when it sits in the same row) and then the row index is toggled.
When every label occurs once per row this is an ordinary interval exchange.

Conventions used throughout:

* intervals are half-open ``[a, b)``;
* the sign of a translation is ``image - source``;
* generalized permutations are written as text ``"A A B C / D C B D"``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Sequence

from .exactnum import FieldMismatch, KNum, WedgeNum, common_field, parse_knum, wedgeK

__all__ = [
    "GenPerm",
    "LinearInvolution",
    "RauzyStep",
    "PeriodicityVerdict",
    "InvolutionError",
    "EqualLengths",
    "SameRightmostLetter",
    "EmptyRow",
    "NotAPermutation",
    "validate",
    "isTruePermutation",
    "irreducible",
    "rauzy",
    "rauzySing",
    "eraseCylinderLetter",
    "inverseRauzySing",
    "saf",
    "saf_via_double",
    "translationLengths",
    "galoisFlux",
    "isDecomposed",
    "hasConnection",
    "decideCompletePeriodicity",
    "exceptionalSetMembership",
    "all_genperms",
    "relabel_canonical",
    "rotation",
]


class InvolutionError(ValueError):
    """Base class for errors raised by this module."""


class EqualLengths(InvolutionError):
    """The two rightmost intervals have equal length; use ``rauzySing``."""


class SameRightmostLetter(InvolutionError):
    """Both rows end with the same letter; use ``eraseCylinderLetter``."""


class EmptyRow(InvolutionError):
    """A move would leave one row without intervals."""


class NotAPermutation(InvolutionError):
    """An interval-exchange-only operation met a generalized permutation."""


# ---------------------------------------------------------------------------
# combinatorics


@dataclass(frozen=True)
class GenPerm:
    """Two rows of symbols; every symbol appears exactly twice overall."""

    top: tuple[str, ...]
    bottom: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "top", tuple(str(s) for s in self.top))
        object.__setattr__(self, "bottom", tuple(str(s) for s in self.bottom))
        if not self.top or not self.bottom:
            raise EmptyRow("both rows must be non-empty")
        counts: dict[str, int] = {}
        for s in self.top + self.bottom:
            counts[s] = counts.get(s, 0) + 1
        bad = sorted(s for s, c in counts.items() if c != 2)
        if bad:
            raise InvolutionError(f"symbols must occur exactly twice; offending: {', '.join(bad)}")

    @classmethod
    def parse(cls, text: str) -> "GenPerm":
        if text.count("/") != 1:
            raise ValueError(f"expected exactly one '/' separating the rows in {text!r}")
        top, bottom = text.split("/")
        return cls(tuple(top.split()), tuple(bottom.split()))

    def __str__(self) -> str:
        return f"{' '.join(self.top)} / {' '.join(self.bottom)}"

    @property
    def rows(self) -> tuple[tuple[str, ...], tuple[str, ...]]:
        return (self.top, self.bottom)

    @property
    def alphabet(self) -> tuple[str, ...]:
        """Symbols in order of first appearance (top row, then bottom row)."""
        return tuple(dict.fromkeys(self.top + self.bottom))

    @property
    def d(self) -> int:
        return (len(self.top) + len(self.bottom)) // 2

    @property
    def type(self) -> tuple[int, int]:
        return (len(self.top), len(self.bottom))

    def occurrences(self, symbol: str) -> list[tuple[int, int]]:
        """The two ``(row, index)`` positions of ``symbol``."""
        out = [(0, i) for i, s in enumerate(self.top) if s == symbol]
        out += [(1, i) for i, s in enumerate(self.bottom) if s == symbol]
        return out

    def twin(self, row: int, index: int) -> tuple[int, int]:
        sym = self.rows[row][index]
        for pos in self.occurrences(sym):
            if pos != (row, index):
                return pos
        raise AssertionError("unreachable")

    def is_true_permutation(self) -> bool:
        return len(self.top) == len(self.bottom) and set(self.top) == set(self.bottom)

    def relabel(self, mapping: Mapping[str, str]) -> "GenPerm":
        return GenPerm(tuple(mapping[s] for s in self.top), tuple(mapping[s] for s in self.bottom))

    def canonical(self) -> "GenPerm":
        """Rename symbols ``0, 1, 2, ...`` by order of first appearance."""
        return relabel_canonical(self)

    def swap_rows(self) -> "GenPerm":
        return GenPerm(self.bottom, self.top)


def relabel_canonical(g: GenPerm) -> GenPerm:
    mapping = {s: str(i) for i, s in enumerate(g.alphabet)}
    return g.relabel(mapping)


def isTruePermutation(g: GenPerm) -> bool:
    """True when every symbol appears once in each row."""
    return g.is_true_permutation()


def all_genperms(d: int) -> Iterator[GenPerm]:
    """Every two-row arrangement over ``d`` symbols, up to relabelling.

    Each arrangement is produced once, in canonical labelling.
    """
    n = 2 * d
    seen: set[tuple[tuple[str, ...], tuple[str, ...]]] = set()
    for pairing in _pairings(list(range(n))):
        word = [""] * n
        for label, (i, j) in enumerate(pairing):
            word[i] = word[j] = str(label)
        for l in range(1, n):
            g = relabel_canonical(GenPerm(tuple(word[:l]), tuple(word[l:])))
            key = (g.top, g.bottom)
            if key not in seen:
                seen.add(key)
                yield g


def _pairings(items: list[int]) -> Iterator[list[tuple[int, int]]]:
    if not items:
        yield []
        return
    first = items[0]
    for k in range(1, len(items)):
        rest = items[1:k] + items[k + 1 :]
        for tail in _pairings(rest):
            yield [(first, items[k])] + tail


# ---------------------------------------------------------------------------
# irreducibility


def irreducible(g: GenPerm) -> bool:
    """Decide irreducibility by searching all corner decompositions.

    A decomposition picks a top-left block ``top[:i]``, a top-right block
    ``top[l-k:]``, a bottom-left block ``bottom[:j]`` and a bottom-right block
    ``bottom[m-n:]`` (the blocks in one row do not overlap).  Every symbol
    placed in a corner must have its two occurrences in two different corners
    that share a side: left (both left corners), top, bottom or right.  Not
    every corner may be empty, and the empty corners must be: none; exactly
    one on the left; or exactly two on the same side.  Blocks that swallow
    both full rows on the same side are trivial and never count.
    """
    return _find_reduction(g) is None


def _find_reduction(g: GenPerm) -> tuple[int, int, int, int] | None:
    top, bottom = g.top, g.bottom
    l, m = len(top), len(bottom)
    occ = {s: g.occurrences(s) for s in g.alphabet}
    for i in range(l + 1):
        for k in range(l - i + 1):
            for j in range(m + 1):
                for n in range(m - j + 1):
                    if (i == l and j == m) or (k == l and n == m):
                        continue
                    if _corners_ok(i, k, j, n, l, m, occ):
                        return (i, k, j, n)
    return None


def _corner_of(pos: tuple[int, int], i: int, k: int, j: int, n: int, l: int, m: int) -> str | None:
    row, idx = pos
    if row == 0:
        if idx < i:
            return "TL"
        if idx >= l - k:
            return "TR"
        return None
    if idx < j:
        return "BL"
    if idx >= m - n:
        return "BR"
    return None


_ALLOWED_PAIRS = {
    frozenset(("TL", "BL")),  # set A
    frozenset(("TL", "TR")),  # set B
    frozenset(("BL", "BR")),  # set C
    frozenset(("TR", "BR")),  # set D
}


def _corners_ok(i, k, j, n, l, m, occ) -> bool:
    empty = {"TL": i == 0, "TR": k == 0, "BL": j == 0, "BR": n == 0}
    count = sum(empty.values())
    if count == 4:
        return False
    if count == 1 and not (empty["TL"] or empty["BL"]):
        return False
    if count == 2 and not (
        (empty["TL"] and empty["BL"]) or (empty["TR"] and empty["BR"])
    ):
        return False
    if count == 3:
        return False
    for positions in occ.values():
        c0 = _corner_of(positions[0], i, k, j, n, l, m)
        c1 = _corner_of(positions[1], i, k, j, n, l, m)
        if c0 is None and c1 is None:
            continue
        if c0 is None or c1 is None or frozenset((c0, c1)) not in _ALLOWED_PAIRS:
            return False
    return True


# ---------------------------------------------------------------------------
# linear involutions


def _to_knum(x, f: int) -> KNum:
    if isinstance(x, KNum):
        if x.f == f:
            return x
        if x.b == 0:
            return KNum(x.a, 0, f)
        raise FieldMismatch(f"length {x} is not in Q(sqrt {f})")
    if isinstance(x, str):
        return _to_knum(parse_knum(x), f)
    return KNum(x, 0, f)


@dataclass(frozen=True)
class LinearInvolution:
    """A generalized permutation together with positive exact lengths."""

    perm: GenPerm
    lengths: Mapping[str, KNum]
    f: int = field(default=1)

    def __post_init__(self) -> None:
        raw = dict(self.lengths)
        missing = [s for s in self.perm.alphabet if s not in raw]
        if missing:
            raise InvolutionError(f"missing lengths for {', '.join(missing)}")
        extra = [s for s in raw if s not in self.perm.alphabet]
        if extra:
            raise InvolutionError(f"lengths given for unknown symbols {', '.join(map(str, extra))}")
        parsed = {s: parse_knum(v) if isinstance(v, str) else v for s, v in raw.items()}
        f = max(self.f, common_field(parsed.values()))
        lengths = {s: _to_knum(parsed[s], f) for s in self.perm.alphabet}
        bad = [s for s, v in lengths.items() if v.sign() <= 0]
        if bad:
            raise InvolutionError(f"lengths must be positive; offending: {', '.join(bad)}")
        top = sum((lengths[s] for s in self.perm.top), KNum(0, 0, f))
        bottom = sum((lengths[s] for s in self.perm.bottom), KNum(0, 0, f))
        if top != bottom:
            raise InvolutionError(f"row sums differ: top {top} vs bottom {bottom}")
        object.__setattr__(self, "lengths", lengths)
        object.__setattr__(self, "f", f)

    # -- basic data ------------------------------------------------------------

    @property
    def d(self) -> int:
        return self.perm.d

    @property
    def total(self) -> KNum:
        return sum((self.lengths[s] for s in self.perm.top), KNum(0, 0, self.f))

    def starts(self, row: int) -> list[KNum]:
        """Left endpoints of the subintervals of ``row``."""
        out = []
        acc = KNum(0, 0, self.f)
        for s in self.perm.rows[row]:
            out.append(acc)
            acc = acc + self.lengths[s]
        return out

    def division_points(self, row: int) -> list[KNum]:
        """Interior cut points of ``row`` (excluding 0 and L)."""
        return self.starts(row)[1:]

    def locate(self, x: KNum, row: int) -> int | None:
        """Index of the subinterval of ``row`` containing ``x`` in its interior.

        Returns ``None`` when ``x`` is a cut point or lies outside ``(0, L)``.
        """
        acc = KNum(0, 0, self.f)
        for idx, s in enumerate(self.perm.rows[row]):
            nxt = acc + self.lengths[s]
            if acc < x < nxt:
                return idx
            if x == acc or x == nxt:
                return None
            acc = nxt
        return None

    def __call__(self, x: KNum, row: int) -> tuple[KNum, int]:
        """Apply the involution to a non-singular point ``(x, row)``."""
        x = _to_knum(x, self.f)
        idx = self.locate(x, row)
        if idx is None:
            raise InvolutionError(f"({x}, {row}) is singular or outside the interval")
        s = self.starts(row)[idx]
        trow, tidx = self.perm.twin(row, idx)
        t = self.starts(trow)[tidx]
        lam = self.lengths[self.perm.rows[row][idx]]
        y = x - s + t if trow != row else t + lam - (x - s)
        return y, 1 - trow

    def relabel(self, mapping: Mapping[str, str]) -> "LinearInvolution":
        return LinearInvolution(
            self.perm.relabel(mapping), {mapping[s]: v for s, v in self.lengths.items()}, self.f
        )

    def swap_rows(self) -> "LinearInvolution":
        return LinearInvolution(self.perm.swap_rows(), self.lengths, self.f)

    def scale(self, q) -> "LinearInvolution":
        return LinearInvolution(self.perm, {s: v * q for s, v in self.lengths.items()}, self.f)

    def to_json(self) -> dict:
        return {"perm": str(self.perm), "lengths": {s: str(v) for s, v in self.lengths.items()}}

    @classmethod
    def from_json(cls, obj: Mapping) -> "LinearInvolution":
        perm = GenPerm.parse(obj["perm"])
        lengths = {}
        for s, v in obj["lengths"].items():
            lengths[str(s)] = KNum.from_json(v) if isinstance(v, Mapping) else parse_knum(str(v))
        return cls(perm, lengths)

    def __str__(self) -> str:
        lens = ", ".join(f"{s}={self.lengths[s]}" for s in self.perm.alphabet)
        return f"({self.perm}; {lens})"


def validate(g: GenPerm, lengths: Mapping[str, object]) -> LinearInvolution:
    """Check ``lengths`` against ``g`` and return the linear involution."""
    return LinearInvolution(g, dict(lengths))


def rotation(lam_a, lam_b) -> LinearInvolution:
    """The two-interval exchange ``(A B / B A)``: rotation by ``lam_b``."""
    return LinearInvolution(GenPerm(("A", "B"), ("B", "A")), {"A": lam_a, "B": lam_b})


# ---------------------------------------------------------------------------
# Rauzy moves


@dataclass(frozen=True)
class RauzyStep:
    """One reduction move, with enough data to replay it."""

    kind: str  # "Top", "Bottom", "Singular", "EraseCylinderLetter"
    winner: str | None
    loser: str | None
    before: LinearInvolution
    after: LinearInvolution

    def replay(self) -> LinearInvolution:
        if self.kind in ("Top", "Bottom"):
            return rauzy(self.before)[0]
        if self.kind == "Singular":
            return rauzySing(self.before)
        if self.kind == "EraseCylinderLetter":
            return eraseCylinderLetter(self.before)
        raise InvolutionError(f"unknown step kind {self.kind}")

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "winner": self.winner,
            "loser": self.loser,
            "before": self.before.to_json(),
            "after": self.after.to_json(),
        }


def _combinatorial_move(g: GenPerm, winner_row: int) -> tuple[GenPerm, str, str]:
    rows = [list(g.top), list(g.bottom)]
    loser_row = 1 - winner_row
    winner = rows[winner_row][-1]
    loser = rows[loser_row][-1]
    rows[loser_row].pop()
    # twin of the winner: the occurrence other than the last one in its row
    if winner in rows[winner_row][:-1]:
        trow, tidx = winner_row, rows[winner_row].index(winner)
    else:
        trow, tidx = loser_row, rows[loser_row].index(winner)
    if trow == winner_row:
        rows[trow].insert(tidx, loser)
    else:
        rows[trow].insert(tidx + 1, loser)
    if not rows[0] or not rows[1]:
        raise EmptyRow(f"moving {loser} would empty a row")
    return GenPerm(tuple(rows[0]), tuple(rows[1])), winner, loser


def rauzy(T: LinearInvolution) -> tuple[LinearInvolution, RauzyStep]:
    """One step of Rauzy induction (first return to a shorter interval)."""
    g = T.perm
    a, b = g.top[-1], g.bottom[-1]
    if a == b:
        raise SameRightmostLetter(f"both rows end with {a}")
    la, lb = T.lengths[a], T.lengths[b]
    cmp = (la - lb).sign()
    if cmp == 0:
        raise EqualLengths(f"rightmost lengths agree ({a}, {b})")
    winner_row = 0 if cmp > 0 else 1
    perm, winner, loser = _combinatorial_move(g, winner_row)
    lengths = dict(T.lengths)
    lengths[winner] = lengths[winner] - lengths[loser]
    out = LinearInvolution(perm, lengths, T.f)
    return out, RauzyStep("Top" if winner_row == 0 else "Bottom", winner, loser, T, out)


def _drop(g: GenPerm, symbol: str) -> GenPerm:
    top = tuple(s for s in g.top if s != symbol)
    bottom = tuple(s for s in g.bottom if s != symbol)
    if not top or not bottom:
        raise EmptyRow(f"erasing {symbol} would empty a row")
    return GenPerm(top, bottom)


def rauzySing_perm(g: GenPerm) -> GenPerm:
    """Combinatorial part of the singular move (lengths of both ends equal)."""
    if g.d <= 1:
        raise InvolutionError("singular induction needs at least two symbols")
    a, b = g.top[-1], g.bottom[-1]
    if a == b:
        return _drop(g, a)
    moved, winner, _ = _combinatorial_move(g, 0)
    return _drop(moved, winner)


def rauzySing(T: LinearInvolution) -> LinearInvolution:
    """Singular Rauzy induction: the case of equal rightmost lengths."""
    g = T.perm
    a, b = g.top[-1], g.bottom[-1]
    if T.lengths[a] != T.lengths[b]:
        raise InvolutionError(f"rightmost lengths differ ({a}, {b}); use rauzy")
    perm = rauzySing_perm(g)
    erased = a
    lengths = {s: v for s, v in T.lengths.items() if s != erased}
    return LinearInvolution(perm, lengths, T.f)


def eraseCylinderLetter(T: LinearInvolution) -> LinearInvolution:
    """Remove a symbol that ends both rows (a periodic band)."""
    g = T.perm
    a, b = g.top[-1], g.bottom[-1]
    if a != b:
        raise InvolutionError("rows do not end with the same symbol")
    perm = _drop(g, a)
    return LinearInvolution(perm, {s: v for s, v in T.lengths.items() if s != a}, T.f)


def inverseRauzySing(g: GenPerm, alpha: str = "α") -> list[GenPerm]:
    """All ``p`` over ``alphabet + {alpha}`` with ``rauzySing(p)`` equal to ``g``
    up to relabelling, one representative per relabelling class.

    The forward move either erases a symbol ending both rows, or carries the
    last bottom symbol next to the twin of the last top symbol and erases the
    latter.  Every preimage is therefore ``g`` with two new ``alpha`` entries
    and at most one existing entry relocated to the end of a row; all such
    candidates are generated and filtered through the forward move.
    """
    if alpha in g.alphabet:
        raise InvolutionError(f"{alpha!r} already occurs in {g}")
    target = relabel_canonical(g)
    found: dict[GenPerm, GenPerm] = {}
    for cand in _alpha_insertions(g, alpha):
        try:
            image = rauzySing_perm(cand)
        except InvolutionError:
            continue
        if relabel_canonical(image) == target:
            found.setdefault(relabel_canonical(cand), cand)
    return list(found.values())


def _alpha_insertions(g: GenPerm, alpha: str) -> Iterator[GenPerm]:
    rows = [list(g.top), list(g.bottom)]
    slots = [(r, p) for r in (0, 1) for p in range(len(rows[r]) + 1)]
    for first, second in itertools.combinations_with_replacement(slots, 2):
        new = [list(rows[0]), list(rows[1])]
        # insert the later slot first so earlier indices stay valid
        for r, p in sorted((first, second), reverse=True):
            new[r].insert(p, alpha)
        yield from _with_one_relocation(new, alpha)


def _with_one_relocation(rows: list[list[str]], alpha: str) -> Iterator[GenPerm]:
    def make(r0, r1):
        try:
            return GenPerm(tuple(r0), tuple(r1))
        except InvolutionError:
            return None

    base = make(rows[0], rows[1])
    if base is not None:
        yield base
    for r in (0, 1):
        for idx, s in enumerate(rows[r]):
            if s == alpha:
                continue
            for dest in (0, 1):
                new = [list(rows[0]), list(rows[1])]
                new[r].pop(idx)
                new[dest].append(s)
                cand = make(new[0], new[1])
                if cand is not None:
                    yield cand


# ---------------------------------------------------------------------------
# SAF, translations, flux


def saf(T: LinearInvolution) -> WedgeNum:
    """Sah-Arnoux-Fathi invariant, normalised as half the invariant of the
    orientation double.

    Letters split between the rows contribute ``lam ^ (s1 - s0)``; a pair in
    the top row contributes ``-lam ^ (s + s')`` and a pair in the bottom row
    ``+lam ^ (s + s')``, where ``s, s'`` are the two left endpoints.
    """
    g = T.perm
    starts = (T.starts(0), T.starts(1))
    pos: dict[str, list[tuple[int, KNum]]] = {}
    for r in (0, 1):
        for idx, s in enumerate(g.rows[r]):
            pos.setdefault(s, []).append((r, starts[r][idx]))
    total = WedgeNum(0, T.f)
    for sym, ((r0, s0), (r1, s1)) in pos.items():
        lam = T.lengths[sym]
        if r0 != r1:
            total = total + wedgeK(lam, s1 - s0)
        elif r0 == 0:
            total = total - wedgeK(lam, s0 + s1)
        else:
            total = total + wedgeK(lam, s0 + s1)
    return total


def orientation_double(T: LinearInvolution) -> list[tuple[KNum, KNum, KNum]]:
    """Branches ``(start, length, translation)`` of the orientation double,
    an interval exchange on ``[0, 2L)``.

    Row 0 is placed at ``u = x`` and row 1 at ``u = 2L - x``.
    """
    L = T.total
    g = T.perm
    branches = []
    starts = (T.starts(0), T.starts(1))
    for r in (0, 1):
        for idx, sym in enumerate(g.rows[r]):
            lam = T.lengths[sym]
            s = starts[r][idx]
            u0 = s if r == 0 else 2 * L - s - lam
            mid = s + lam / 2
            y, row_out = T(mid, r)
            u_src = mid if r == 0 else 2 * L - mid
            u_img = y if row_out == 0 else 2 * L - y
            branches.append((u0, lam, u_img - u_src))
    return branches


def saf_via_double(T: LinearInvolution) -> WedgeNum:
    """Half of ``sum lam ^ t`` over the branches of the orientation double."""
    total = WedgeNum(0, T.f)
    for _, lam, t in orientation_double(T):
        total = total + wedgeK(lam, t)
    return total / 2


def translationLengths(T: LinearInvolution) -> dict[str, KNum]:
    """Translation amounts ``t_a`` of an interval exchange."""
    if not T.perm.is_true_permutation():
        raise NotAPermutation(f"{T.perm} is not an interval exchange")
    top, bottom = T.starts(0), T.starts(1)
    tpos = {s: top[i] for i, s in enumerate(T.perm.top)}
    bpos = {s: bottom[i] for i, s in enumerate(T.perm.bottom)}
    return {s: bpos[s] - tpos[s] for s in T.perm.alphabet}


def galoisFlux(T: LinearInvolution) -> KNum:
    """Galois flux ``sum lam_a * conj(t_a)`` of an interval exchange."""
    t = translationLengths(T)
    total = KNum(0, 0, T.f)
    for s, lam in T.lengths.items():
        total = total + lam * t[s].conj()
    return total


def iet_power(T: LinearInvolution, x: KNum, n: int) -> KNum:
    """``n``-th iterate of an interval exchange at a regular point."""
    row = 0
    for _ in range(n):
        x, row = T(x, row)
    return x


# ---------------------------------------------------------------------------
# decomposition and connections


def isDecomposed(T: LinearInvolution) -> tuple[LinearInvolution, LinearInvolution] | None:
    """Leftmost split ``(i0, j0)`` into two linear involutions, if any."""
    g = T.perm
    l, m = g.type
    tsum = [KNum(0, 0, T.f)]
    for s in g.top:
        tsum.append(tsum[-1] + T.lengths[s])
    bsum = [KNum(0, 0, T.f)]
    for s in g.bottom:
        bsum.append(bsum[-1] + T.lengths[s])
    candidates = sorted(
        ((i, j) for i in range(1, l) for j in range(1, m)), key=lambda ij: (ij[0] + ij[1], ij[0])
    )
    for i, j in candidates:
        if tsum[i] != bsum[j]:
            continue
        counts: dict[str, int] = {}
        for s in g.top[:i] + g.bottom[:j]:
            counts[s] = counts.get(s, 0) + 1
        if any(c != 2 for c in counts.values()):
            continue
        p1 = GenPerm(g.top[:i], g.bottom[:j])
        p2 = GenPerm(g.top[i:], g.bottom[j:])
        t1 = LinearInvolution(p1, {s: T.lengths[s] for s in p1.alphabet}, T.f)
        t2 = LinearInvolution(p2, {s: T.lengths[s] for s in p2.alphabet}, T.f)
        return t1, t2
    return None


@dataclass(frozen=True)
class Connection:
    """A singular point of the inverse reaching a singular point of ``T``."""

    start: tuple[KNum, int]
    end: tuple[KNum, int]
    length: int


def hasConnection(T: LinearInvolution, maxSteps: int = 1000) -> Connection | None:
    """Search for a connection of length at most ``maxSteps``.

    ``None`` only means that no connection was found within the budget.
    """
    sing = {(x, r) for r in (0, 1) for x in T.division_points(r)}
    sources = [(x, 1 - r) for r in (0, 1) for x in T.division_points(r)]
    for start in sources:
        x, row = start
        for n in range(maxSteps + 1):
            if (x, row) in sing:
                return Connection(start, (x, row), n)
            if n == maxSteps:
                break
            x, row = T(x, row)
    return None


# ---------------------------------------------------------------------------
# decision procedure


@dataclass
class PeriodicityVerdict:
    """Outcome of :func:`decideCompletePeriodicity`.

    ``kind`` is ``"CP"``, ``"NotCP"`` or ``"Inconclusive"``.  For ``NotCP``
    the certificate is a sub-involution with non-zero SAF.  ``tree`` records
    every move performed so that the reduction can be replayed.
    """

    kind: str
    certificate: LinearInvolution | None
    tree: dict
    steps: int

    def to_json(self) -> dict:
        cert = None
        if self.certificate is not None:
            cert = self.certificate.to_json()
            cert["saf"] = str(saf(self.certificate))
        return {"kind": self.kind, "certificate": cert, "steps": self.steps, "tree": self.tree}


class _Budget(Exception):
    pass


class _NotCP(Exception):
    def __init__(self, cert: LinearInvolution):
        self.cert = cert


def decideCompletePeriodicity(T: LinearInvolution, budget: int = 10_000) -> PeriodicityVerdict:
    """Decide complete periodicity of ``T`` by induction and splitting.

    The procedure only returns ``CP`` after reducing every piece to at most
    two intervals with vanishing SAF, and ``NotCP`` with a piece whose SAF is
    non-zero.  Running out of ``budget`` moves gives ``Inconclusive``.
    """
    counter = [0]

    def tick() -> None:
        counter[0] += 1
        if counter[0] > budget:
            raise _Budget

    def solve(node_T: LinearInvolution) -> dict:
        node: dict = {"input": node_T.to_json(), "steps": [], "children": []}
        cur = node_T
        if saf(cur):
            raise _NotCP(cur)
        while True:
            if cur.d <= 2:
                node["result"] = "CP"
                node["final"] = cur.to_json()
                return node
            split = isDecomposed(cur)
            if split is not None:
                t1, t2 = split
                nonzero = [t for t in (t1, t2) if saf(t)]
                if nonzero:
                    raise _NotCP(min(nonzero, key=lambda t: t.d))
                node["split"] = [t1.to_json(), t2.to_json()]
                node["children"] = [solve(t1), solve(t2)]
                node["result"] = "CP"
                return node
            tick()
            a, b = cur.perm.top[-1], cur.perm.bottom[-1]
            if a == b:
                nxt = eraseCylinderLetter(cur)
                step = RauzyStep("EraseCylinderLetter", a, None, cur, nxt)
            elif cur.lengths[a] == cur.lengths[b]:
                nxt = rauzySing(cur)
                step = RauzyStep("Singular", a, b, cur, nxt)
            else:
                nxt, step = rauzy(cur)
            node["steps"].append(
                {"kind": step.kind, "winner": step.winner, "loser": step.loser, "after": nxt.to_json()}
            )
            cur = nxt

    try:
        tree = solve(T)
    except _NotCP as exc:
        return PeriodicityVerdict("NotCP", exc.cert, {}, counter[0])
    except _Budget:
        return PeriodicityVerdict("Inconclusive", None, {}, budget)
    return PeriodicityVerdict("CP", None, tree, counter[0])


def replay_tree(tree: Mapping) -> bool:
    """Re-run every recorded move of a CP tree and compare the outcomes."""
    cur = LinearInvolution.from_json(tree["input"])
    for rec in tree["steps"]:
        kind = rec["kind"]
        if kind == "EraseCylinderLetter":
            nxt = eraseCylinderLetter(cur)
        elif kind == "Singular":
            nxt = rauzySing(cur)
        else:
            nxt, _ = rauzy(cur)
        if nxt.to_json() != rec["after"]:
            return False
        cur = nxt
    if "split" in tree:
        split = isDecomposed(cur)
        if split is None or [t.to_json() for t in split] != tree["split"]:
            return False
        return all(replay_tree(child) for child in tree["children"])
    return cur.d <= 2 and not saf(cur)


# ---------------------------------------------------------------------------
# exceptional sets for five intervals

_E1 = [GenPerm.parse("A B C D x / x A D C B"), GenPerm.parse("A B C D x / B x D C A")]
_E2 = [GenPerm.parse("x B C D x / B A D C A"), GenPerm.parse("A x C D x / B A D C B")]
_E1_KEYS = {relabel_canonical(p) for p in _E1}
_E2_KEYS = {relabel_canonical(p) for p in _E2}


def _is_rotation_block(top: Sequence[str], bottom: Sequence[str]) -> bool:
    return len(top) == 2 and len(bottom) == 2 and top[0] != top[1] and top[0] == bottom[1] and top[1] == bottom[0]


def _is_three_letter_perm(top: Sequence[str], bottom: Sequence[str]) -> bool:
    try:
        return GenPerm(tuple(top), tuple(bottom)).d == 3
    except InvolutionError:
        return False


def exceptionalSetMembership(g: GenPerm) -> str | None:
    """Return ``"E1"``, ``"E2"`` or ``"E3"`` when a five-letter ``g`` lies in
    one of the exceptional families (up to relabelling)."""
    if g.d != 5:
        raise InvolutionError(f"expected five symbols, got {g.d}")
    key = relabel_canonical(g)
    if key in _E1_KEYS:
        return "E1"
    if key in _E2_KEYS:
        return "E2"
    t, b = g.top, g.bottom
    if _is_rotation_block(t[:2], b[:2]) and _is_three_letter_perm(t[2:], b[2:]):
        return "E3"
    if _is_rotation_block(t[-2:], b[-2:]) and _is_three_letter_perm(t[:-2], b[:-2]):
        return "E3"
    return None
