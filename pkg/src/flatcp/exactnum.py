"""Exact arithmetic over Q, a real quadratic field K = Q(sqrt f), K(i), and
the rational wedge spaces used by scissors-congruence invariants.

Everything here is immutable and exact.  Rationals are plain
:class:`fractions.Fraction` values.  An element ``a + b*sqrt(f)`` of K is a
:class:`KNum`; the field is identified by the square-free integer ``f`` and
``f == 1`` encodes Q itself (then ``b`` is always folded into ``a``).

Two elements of different fields never combine silently: that raises
:class:`FieldMismatch`.  Python ``int`` and ``Fraction`` operands are
accepted everywhere and embed into whatever field the other operand lives in.

Text literals::

    >>> parse_knum("-1/2+3/4*sqrt(20)")
    KNum('-1/2+3/2*sqrt(5)')
    >>> parse_knum("(-1+1*sqrt(17))/6")
    KNum('-1/6+1/6*sqrt(17)')
"""

from __future__ import annotations

import ast
import decimal
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence, Union

__all__ = [
    "FieldMismatch",
    "QuadField",
    "KNum",
    "KiNum",
    "WedgeNum",
    "JNum",
    "KMat2",
    "Rational",
    "as_fraction",
    "wedgeK",
    "conj",
    "conjKi",
    "norm",
    "signK",
    "jWedge",
    "jxx",
    "parse_rat",
    "parse_knum",
    "squarefree_part",
    "common_field",
]

Rational = Union[int, Fraction]


class FieldMismatch(ValueError):
    """Raised when values from two different quadratic fields meet."""


# ---------------------------------------------------------------------------
# fields


def squarefree_part(n: int) -> tuple[int, int]:
    """Return ``(s, f)`` with ``n == s*s*f`` and ``f`` square-free.

    ``n`` must be a positive integer.
    """
    if n <= 0:
        raise ValueError(f"expected a positive integer, got {n}")
    s, f = 1, 1
    m = n
    p = 2
    while p * p <= m:
        e = 0
        while m % p == 0:
            m //= p
            e += 1
        s *= p ** (e // 2)
        if e % 2:
            f *= p
        p += 1 if p == 2 else 2
    f *= m
    return s, f


@dataclass(frozen=True)
class QuadField:
    """The field Q(sqrt f) for square-free ``f >= 1``; ``f == 1`` is Q."""

    f: int

    def __post_init__(self) -> None:
        if not isinstance(self.f, int) or self.f < 1:
            raise ValueError(f"field parameter must be a positive integer, got {self.f!r}")
        if squarefree_part(self.f)[1] != self.f:
            raise ValueError(f"{self.f} is not square-free")

    @property
    def is_rational(self) -> bool:
        return self.f == 1

    def __call__(self, a: Rational = 0, b: Rational = 0) -> "KNum":
        return KNum(a, b, self.f)

    def sqrt(self) -> "KNum":
        """The generator sqrt(f) (equal to 1 over Q)."""
        return KNum(0, 1, self.f)

    def __str__(self) -> str:
        return "Q" if self.f == 1 else f"Q(sqrt({self.f}))"


@lru_cache(maxsize=None)
def _checked_field(f: int) -> int:
    QuadField(f)
    return f


def as_fraction(x: Rational) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"expected an exact rational, got {type(x).__name__}")


def _field_of(x) -> int | None:
    return x.f if isinstance(x, (KNum, KiNum, WedgeNum, JNum)) else None


def common_field(values: Iterable) -> int:
    """The unique field parameter shared by ``values`` (1 if none carry one)."""
    f = 1
    for v in values:
        g = _field_of(v)
        if g is None or g == 1:
            continue
        if f == 1:
            f = g
        elif g != f:
            raise FieldMismatch(f"values from Q(sqrt {f}) and Q(sqrt {g})")
    return f


# ---------------------------------------------------------------------------
# K


class KNum:
    """An element ``a + b*sqrt(f)`` of a real quadratic field (or of Q)."""

    __slots__ = ("a", "b", "f")

    def __init__(self, a: Rational = 0, b: Rational = 0, f: int = 1):
        a = as_fraction(a)
        b = as_fraction(b)
        f = _checked_field(f)
        if f == 1:
            a, b = a + b, Fraction(0)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "f", f)

    @classmethod
    def _raw(cls, a: Fraction, b: Fraction, f: int) -> "KNum":
        obj = object.__new__(cls)
        object.__setattr__(obj, "a", a)
        object.__setattr__(obj, "b", b)
        object.__setattr__(obj, "f", f)
        return obj

    def __setattr__(self, name, value):
        raise AttributeError("KNum is immutable")

    @property
    def field(self) -> QuadField:
        return QuadField(self.f)

    @property
    def is_rational(self) -> bool:
        return self.b == 0

    # -- coercion ----------------------------------------------------------

    def _coerce(self, other) -> "KNum":
        if isinstance(other, KNum):
            if other.f != self.f:
                raise FieldMismatch(f"cannot combine {self.field} and {other.field}")
            return other
        if isinstance(other, (int, Fraction)):
            return KNum._raw(Fraction(other), Fraction(0), self.f)
        return NotImplemented

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return KNum._raw(self.a + o.a, self.b + o.b, self.f)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return KNum._raw(self.a - o.a, self.b - o.b, self.f)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return KNum._raw(o.a - self.a, o.b - self.b, self.f)

    def __neg__(self):
        return KNum._raw(-self.a, -self.b, self.f)

    def __pos__(self):
        return self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return KNum._raw(self.a * other, self.b * other, self.f)
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        a, b, c, d = self.a, self.b, o.a, o.b
        return KNum._raw(a * c + b * d * self.f, a * d + b * c, self.f)

    __rmul__ = __mul__

    def inverse(self) -> "KNum":
        n = self.a * self.a - self.b * self.b * self.f
        if n == 0:
            raise ZeroDivisionError("division by zero in K")
        return KNum._raw(self.a / n, -self.b / n, self.f)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by zero in K")
            return KNum._raw(self.a / other, self.b / other, self.f)
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result = KNum._raw(Fraction(1), Fraction(0), self.f)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- Galois structure ----------------------------------------------------

    def conj(self) -> "KNum":
        return KNum._raw(self.a, -self.b, self.f)

    def norm(self) -> Fraction:
        return self.a * self.a - self.b * self.b * self.f

    def trace(self) -> Fraction:
        return 2 * self.a

    # -- order ---------------------------------------------------------------

    def sign(self) -> int:
        return _sign(self.a, self.b, self.f)

    def __bool__(self) -> bool:
        return self.a != 0 or self.b != 0

    def __eq__(self, other) -> bool:
        if isinstance(other, KNum):
            if other.f != self.f:
                if self.b == 0 and other.b == 0:
                    return self.a == other.a
                return False
            return self.a == other.a and self.b == other.b
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and self.a == other
        return NotImplemented

    def __hash__(self) -> int:
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.f))

    def _cmp(self, other) -> int:
        o = self._coerce(other)
        if o is NotImplemented:
            raise TypeError(f"cannot compare KNum with {type(other).__name__}")
        return _sign(self.a - o.a, self.b - o.b, self.f)

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __float__(self) -> float:
        return float(self.a) + float(self.b) * math.sqrt(self.f)

    def approx(self, digits: int = 20) -> str:
        """Decimal approximation, for display only."""
        with decimal.localcontext() as ctx:
            ctx.prec = digits + 10
            val = decimal.Decimal(self.a.numerator) / self.a.denominator
            val += decimal.Decimal(self.b.numerator) / self.b.denominator * decimal.Decimal(self.f).sqrt()
            ctx.prec = digits
            return str(+val)

    # -- serialisation ---------------------------------------------------------

    def __str__(self) -> str:
        if self.b == 0:
            return _rat_str(self.a)
        head = "" if self.a == 0 else _rat_str(self.a)
        if self.b < 0:
            op = "-"
        else:
            op = "+" if head else ""
        return f"{head}{op}{_rat_str(abs(self.b))}*sqrt({self.f})"

    def __repr__(self) -> str:
        return f"KNum('{self}')"

    def to_json(self) -> dict:
        return {"a": _rat_str(self.a), "b": _rat_str(self.b), "f": self.f}

    @classmethod
    def from_json(cls, obj: dict) -> "KNum":
        return cls(parse_rat(str(obj["a"])), parse_rat(str(obj.get("b", "0"))), int(obj.get("f", 1)))

    def in_field(self, f: int) -> "KNum":
        """Re-home a rational value into ``Q(sqrt f)``; irrational values must already match."""
        if self.f == f:
            return self
        if self.b != 0:
            raise FieldMismatch(f"{self} does not lie in Q(sqrt {f})")
        return KNum(self.a, 0, f)


def _rat_str(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _sign(a: Fraction, b: Fraction, f: int) -> int:
    """Exact sign of ``a + b*sqrt(f)`` by a squaring comparison."""
    sa = (a > 0) - (a < 0)
    sb = (b > 0) - (b < 0)
    if sb == 0 or f == 1:
        s = a + b if f == 1 else a
        return (s > 0) - (s < 0)
    if sa == 0 or sa == sb:
        return sb
    # opposite signs: compare a^2 with b^2 f
    lhs = a * a
    rhs = b * b * f
    if lhs > rhs:
        return sa
    if lhs < rhs:
        return sb
    return 0


def signK(x: KNum | Rational) -> int:
    """Exact sign of an element of K, in {-1, 0, 1}."""
    if isinstance(x, KNum):
        return x.sign()
    q = as_fraction(x)
    return (q > 0) - (q < 0)


def conj(x: KNum | Rational) -> KNum | Fraction:
    """Galois conjugate ``a - b sqrt f``; rationals are fixed."""
    if isinstance(x, KNum):
        return x.conj()
    return as_fraction(x)


def norm(x: KNum | Rational) -> Fraction:
    """Field norm ``x * conj(x)``."""
    if isinstance(x, KNum):
        return x.norm()
    q = as_fraction(x)
    return q * q


# ---------------------------------------------------------------------------
# K(i)


class KiNum:
    """An element ``re + i*im`` of K(i) with ``re, im`` in one quadratic field."""

    __slots__ = ("re", "im", "f")

    def __init__(self, re: KNum | Rational = 0, im: KNum | Rational = 0, f: int | None = None):
        if f is None:
            f = common_field([re, im])
        re = _to_k(re, f)
        im = _to_k(im, f)
        object.__setattr__(self, "re", re)
        object.__setattr__(self, "im", im)
        object.__setattr__(self, "f", f)

    def __setattr__(self, name, value):
        raise AttributeError("KiNum is immutable")

    def _coerce(self, other) -> "KiNum":
        if isinstance(other, KiNum):
            if other.f != self.f:
                raise FieldMismatch(f"cannot combine Q(sqrt {self.f})(i) and Q(sqrt {other.f})(i)")
            return other
        if isinstance(other, (KNum, int, Fraction)):
            return KiNum(_to_k(other, self.f), 0, self.f)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return KiNum(self.re + o.re, self.im + o.im, self.f)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return KiNum(self.re - o.re, self.im - o.im, self.f)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __neg__(self):
        return KiNum(-self.re, -self.im, self.f)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return KiNum(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re, self.f)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        d = o.re * o.re + o.im * o.im
        if not d:
            raise ZeroDivisionError("division by zero in K(i)")
        num = self * o.cc()
        return KiNum(num.re / d, num.im / d, self.f)

    def cc(self) -> "KiNum":
        """Complex conjugate ``re - i im``."""
        return KiNum(self.re, -self.im, self.f)

    def conj(self) -> "KiNum":
        """Galois conjugate, applied to both coordinates."""
        return KiNum(self.re.conj(), self.im.conj(), self.f)

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    def __eq__(self, other) -> bool:
        if isinstance(other, KiNum):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (KNum, int, Fraction)):
            return not self.im and self.re == other
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.re, self.im))

    def __str__(self) -> str:
        if not self.im:
            return str(self.re)
        return f"({self.re})+i*({self.im})"

    def __repr__(self) -> str:
        return f"KiNum('{self}')"

    def to_json(self) -> dict:
        return {"re": str(self.re), "im": str(self.im), "f": self.f}

    @property
    def vector(self) -> tuple[KNum, KNum]:
        return (self.re, self.im)


def conjKi(z: KiNum) -> KiNum:
    """Galois conjugation ``(k1 + i k2)' = k1' + i k2'``."""
    return z.conj()


def _to_k(x, f: int) -> KNum:
    if isinstance(x, KNum):
        if x.f == f:
            return x
        if x.f == 1:
            return KNum._raw(x.a, Fraction(0), f)
        raise FieldMismatch(f"{x} is not in Q(sqrt {f})")
    return KNum._raw(as_fraction(x), Fraction(0), _checked_field(f))


# ---------------------------------------------------------------------------
# K ^_Q K  (one-dimensional, spanned by 1 ^ sqrt f)


class WedgeNum:
    """The element ``c * (1 ^ sqrt f)`` of ``K ^_Q K``."""

    __slots__ = ("c", "f")

    def __init__(self, c: Rational = 0, f: int = 1):
        c = as_fraction(c)
        f = _checked_field(f)
        if f == 1:
            c = Fraction(0)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "f", f)

    def __setattr__(self, name, value):
        raise AttributeError("WedgeNum is immutable")

    def _check(self, other: "WedgeNum") -> None:
        if self.f != other.f and self.f != 1 and other.f != 1:
            raise FieldMismatch(f"cannot combine wedges over Q(sqrt {self.f}) and Q(sqrt {other.f})")

    def __add__(self, other):
        if isinstance(other, int) and other == 0:
            return self
        if not isinstance(other, WedgeNum):
            return NotImplemented
        self._check(other)
        return WedgeNum(self.c + other.c, max(self.f, other.f))

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, WedgeNum):
            return NotImplemented
        self._check(other)
        return WedgeNum(self.c - other.c, max(self.f, other.f))

    def __neg__(self):
        return WedgeNum(-self.c, self.f)

    def __mul__(self, q):
        if isinstance(q, (int, Fraction)):
            return WedgeNum(self.c * q, self.f)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, q):
        if isinstance(q, (int, Fraction)):
            return WedgeNum(self.c / as_fraction(q), self.f)
        return NotImplemented

    def __bool__(self) -> bool:
        return self.c != 0

    def is_zero(self) -> bool:
        return self.c == 0

    def __eq__(self, other) -> bool:
        if isinstance(other, WedgeNum):
            return self.c == other.c and (self.c == 0 or self.f == other.f)
        if isinstance(other, int) and other == 0:
            return self.c == 0
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.c, self.f if self.c else 0))

    def __str__(self) -> str:
        if self.c == 0:
            return "0"
        return f"{_rat_str(self.c)}*(1^sqrt({self.f}))"

    def __repr__(self) -> str:
        return f"WedgeNum('{self}')"

    def to_json(self) -> dict:
        return {"c": _rat_str(self.c), "f": self.f}


def wedgeK(x: KNum | Rational, y: KNum | Rational) -> WedgeNum:
    """``x ^_Q y`` expanded on the basis ``1 ^ sqrt f``: ``(x.a y.b - x.b y.a)``."""
    f = common_field([x, y])
    xk = _to_k(x, f)
    yk = _to_k(y, f)
    return WedgeNum(xk.a * yk.b - xk.b * yk.a, f)


# ---------------------------------------------------------------------------
# Lambda^2_Q (K^2): six coordinates over u1=(1,0), u2=(sqrt f,0), u3=(0,1), u4=(0,sqrt f)

_PAIRS: tuple[tuple[int, int], ...] = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))


class JNum:
    """An element of ``Lambda^2_Q(K^2)`` in the basis
    ``u1^u2, u1^u3, u1^u4, u2^u3, u2^u4, u3^u4``."""

    __slots__ = ("coeffs", "f")

    def __init__(self, coeffs: Sequence[Rational] = (0, 0, 0, 0, 0, 0), f: int = 1):
        if len(coeffs) != 6:
            raise ValueError("JNum needs exactly six coefficients")
        f = _checked_field(f)
        cs = tuple(as_fraction(c) for c in coeffs)
        if f == 1:
            # u2 = u1 and u4 = u3 over Q: only u1^u3 survives.
            c13 = cs[1] + cs[2] - cs[3] + cs[4]
            cs = (Fraction(0), c13, Fraction(0), Fraction(0), Fraction(0), Fraction(0))
        object.__setattr__(self, "coeffs", cs)
        object.__setattr__(self, "f", f)

    def __setattr__(self, name, value):
        raise AttributeError("JNum is immutable")

    def __add__(self, other):
        if isinstance(other, int) and other == 0:
            return self
        if not isinstance(other, JNum):
            return NotImplemented
        f = _merge_fields(self.f, other.f)
        return JNum([a + b for a, b in zip(self.coeffs, other.coeffs)], f)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, JNum):
            return NotImplemented
        f = _merge_fields(self.f, other.f)
        return JNum([a - b for a, b in zip(self.coeffs, other.coeffs)], f)

    def __neg__(self):
        return JNum([-a for a in self.coeffs], self.f)

    def __mul__(self, q):
        if isinstance(q, (int, Fraction)):
            return JNum([a * q for a in self.coeffs], self.f)
        return NotImplemented

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if isinstance(other, JNum):
            return self.coeffs == other.coeffs
        if isinstance(other, int) and other == 0:
            return not any(self.coeffs)
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __bool__(self) -> bool:
        return any(self.coeffs)

    def __str__(self) -> str:
        names = ("u1^u2", "u1^u3", "u1^u4", "u2^u3", "u2^u4", "u3^u4")
        terms = [f"{_rat_str(c)}*{n}" for c, n in zip(self.coeffs, names) if c]
        return " + ".join(terms) if terms else "0"

    def __repr__(self) -> str:
        return f"JNum('{self}')"

    def to_json(self) -> dict:
        return {"coeffs": [_rat_str(c) for c in self.coeffs], "f": self.f}


def _merge_fields(f: int, g: int) -> int:
    if f == g or g == 1:
        return f
    if f == 1:
        return g
    raise FieldMismatch(f"cannot combine Q(sqrt {f}) and Q(sqrt {g})")


def _qcoords(v: Sequence[KNum | Rational], f: int) -> tuple[Fraction, Fraction, Fraction, Fraction]:
    x = _to_k(v[0], f)
    y = _to_k(v[1], f)
    return (x.a, x.b, y.a, y.b)


def jWedge(v: Sequence[KNum | Rational], w: Sequence[KNum | Rational]) -> JNum:
    """Expand ``v ^_Q w`` for ``v, w`` in K^2 over the six-element basis."""
    f = common_field(list(v) + list(w))
    x = _qcoords(v, f)
    y = _qcoords(w, f)
    return JNum([x[i] * y[j] - x[j] * y[i] for i, j in _PAIRS], f)


def jxx(J: JNum) -> WedgeNum:
    """Projection onto the ``u1 ^ u2`` coordinate, i.e. the ``x ^ x`` part."""
    return WedgeNum(J.coeffs[0], J.f)


# ---------------------------------------------------------------------------
# 2x2 matrices over K


class KMat2:
    """A 2x2 matrix ``[[a, b], [c, d]]`` over K."""

    __slots__ = ("a", "b", "c", "d", "f")

    def __init__(self, a, b, c, d, f: int | None = None):
        if f is None:
            f = common_field([a, b, c, d])
        object.__setattr__(self, "a", _to_k(a, f))
        object.__setattr__(self, "b", _to_k(b, f))
        object.__setattr__(self, "c", _to_k(c, f))
        object.__setattr__(self, "d", _to_k(d, f))
        object.__setattr__(self, "f", f)

    def __setattr__(self, name, value):
        raise AttributeError("KMat2 is immutable")

    @classmethod
    def identity(cls, f: int = 1) -> "KMat2":
        return cls(1, 0, 0, 1, f)

    def det(self) -> KNum:
        return self.a * self.d - self.b * self.c

    def is_invertible(self) -> bool:
        return bool(self.det())

    def inverse(self) -> "KMat2":
        det = self.det()
        if not det:
            raise ZeroDivisionError("singular matrix")
        return KMat2(self.d / det, -self.b / det, -self.c / det, self.a / det, self.f)

    def __mul__(self, other):
        if isinstance(other, KMat2):
            f = _merge_fields(self.f, other.f)
            return KMat2(
                self.a * other.a + self.b * other.c,
                self.a * other.b + self.b * other.d,
                self.c * other.a + self.d * other.c,
                self.c * other.b + self.d * other.d,
                f,
            )
        return NotImplemented

    def apply(self, v: Sequence[KNum | Rational]) -> tuple[KNum, KNum]:
        x = _to_k(v[0], self.f) if not isinstance(v[0], KNum) else v[0]
        y = _to_k(v[1], self.f) if not isinstance(v[1], KNum) else v[1]
        return (self.a * x + self.b * y, self.c * x + self.d * y)

    def __eq__(self, other) -> bool:
        if not isinstance(other, KMat2):
            return NotImplemented
        return (self.a, self.b, self.c, self.d) == (other.a, other.b, other.c, other.d)

    def __hash__(self) -> int:
        return hash((self.a, self.b, self.c, self.d))

    def __repr__(self) -> str:
        return f"KMat2([[{self.a}, {self.b}], [{self.c}, {self.d}]])"


# ---------------------------------------------------------------------------
# text literals


def parse_rat(text: str) -> Fraction:
    """Parse ``'-'? digits ('/' digits)?``."""
    s = text.strip()
    body = s[1:] if s.startswith("-") else s
    num, _, den = body.partition("/")
    if not num.isdigit() or (den and not den.isdigit()):
        raise ValueError(f"not a rational literal: {text!r}")
    q = Fraction(int(num), int(den) if den else 1)
    return -q if s.startswith("-") else q


class _Lit:
    """Intermediate value while evaluating a literal: ``a + b*sqrt(f)``."""

    __slots__ = ("a", "b", "f")

    def __init__(self, a: Fraction, b: Fraction = Fraction(0), f: int | None = None):
        self.a, self.b, self.f = a, b, f


def parse_knum(text: str, field: int | QuadField | None = None) -> KNum:
    """Parse a KNUM literal, or any arithmetic expression in integers and
    ``sqrt(n)`` using ``+ - * /`` and parentheses.

    All square roots in one literal must share a square-free part.  When
    ``field`` is given, the result lives in that field (a rational literal is
    embedded; an irrational one must match).
    """
    f_req = field.f if isinstance(field, QuadField) else field
    try:
        tree = ast.parse(text.strip(), mode="eval")
    except SyntaxError as err:
        col = (err.offset or 1)
        raise ValueError(f"cannot parse number {text!r} at column {col}: {err.msg}") from None
    lit = _eval_lit(tree.body, text)
    f = lit.f or 1
    if f_req is not None:
        if lit.b != 0 and f != f_req:
            raise FieldMismatch(f"{text!r} lies in Q(sqrt {f}), expected Q(sqrt {f_req})")
        f = f_req
    return KNum(lit.a, lit.b, f)


def _eval_lit(node, text: str) -> _Lit:
    where = f"column {getattr(node, 'col_offset', 0) + 1}"
    if isinstance(node, ast.Constant) and isinstance(node.value, int) and not isinstance(node.value, bool):
        return _Lit(Fraction(node.value))
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        v = _eval_lit(node.operand, text)
        if isinstance(node.op, ast.USub):
            return _Lit(-v.a, -v.b, v.f)
        return v
    if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id == "sqrt":
        if len(node.args) != 1 or node.keywords:
            raise ValueError(f"sqrt takes one integer argument ({where} of {text!r})")
        arg = _eval_lit(node.args[0], text)
        if arg.b != 0 or arg.a.denominator != 1 or arg.a < 0:
            raise ValueError(f"sqrt needs a non-negative integer ({where} of {text!r})")
        n = int(arg.a)
        if n == 0:
            return _Lit(Fraction(0))
        s, f = squarefree_part(n)
        if f == 1:
            return _Lit(Fraction(s))
        return _Lit(Fraction(0), Fraction(s), f)
    if isinstance(node, ast.BinOp) and isinstance(node.op, (ast.Add, ast.Sub, ast.Mult, ast.Div)):
        x = _eval_lit(node.left, text)
        y = _eval_lit(node.right, text)
        if x.f and y.f and x.f != y.f:
            raise FieldMismatch(f"mixed square roots in {text!r}")
        f = x.f or y.f
        fx = f or 1
        if isinstance(node.op, ast.Add):
            return _Lit(x.a + y.a, x.b + y.b, f)
        if isinstance(node.op, ast.Sub):
            return _Lit(x.a - y.a, x.b - y.b, f)
        if isinstance(node.op, ast.Mult):
            return _Lit(x.a * y.a + x.b * y.b * fx, x.a * y.b + x.b * y.a, f)
        n = y.a * y.a - y.b * y.b * fx
        if n == 0:
            raise ZeroDivisionError(f"division by zero in {text!r}")
        ia, ib = y.a / n, -y.b / n
        return _Lit(x.a * ia + x.b * ib * fx, x.a * ib + x.b * ia, f)
    raise ValueError(f"unsupported syntax at {where} of {text!r}")
