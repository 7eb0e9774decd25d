from __future__ import annotations

import decimal
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flatcp.exactnum import (
    FieldMismatch,
    JNum,
    KiNum,
    KMat2,
    KNum,
    QuadField,
    WedgeNum,
    conj,
    conjKi,
    jWedge,
    jxx,
    norm,
    parse_knum,
    parse_rat,
    signK,
    squarefree_part,
    wedgeK,
)

rats = st.fractions(max_denominator=50).filter(lambda q: abs(q) < 1000)
fields = st.sampled_from([2, 3, 5, 17, 41])


@st.composite
def knums(draw, f=None):
    f = f if f is not None else draw(fields)
    return KNum(draw(rats), draw(rats), f)


@st.composite
def same_field_pair(draw):
    f = draw(fields)
    return draw(knums(f)), draw(knums(f))


def sqrt5(a=0, b=1):
    return KNum(a, b, 5)


# -- construction and parsing ---------------------------------------------------


def test_squarefree_part_extracts_square_factor():
    assert squarefree_part(20) == (2, 5)
    assert squarefree_part(17) == (1, 17)
    assert squarefree_part(32) == (4, 2)
    assert squarefree_part(9) == (3, 1)


def test_rational_field_folds_b():
    x = KNum(3, 7, 1)
    assert x.b == 0 and x.f == 1
    assert QuadField(1).is_rational


def test_parse_literals():
    assert parse_knum("-1/2+3/4*sqrt(20)") == KNum(Fraction(-1, 2), Fraction(3, 2), 5)
    assert parse_knum("(-1+1*sqrt(17))/6") == KNum(Fraction(-1, 6), Fraction(1, 6), 17)
    assert parse_knum("7") == KNum(7)
    assert parse_rat("-3/9") == Fraction(-1, 3)


def test_parse_rejects_garbage():
    with pytest.raises((ValueError, SyntaxError)):
        parse_knum("sqrt(5")
    with pytest.raises((ValueError, SyntaxError)):
        parse_knum("__import__('os')")


def test_mixing_fields_raises():
    with pytest.raises(FieldMismatch):
        _ = KNum(0, 1, 5) + KNum(0, 1, 17)


def test_python_rationals_embed_but_knums_of_q_do_not():
    assert KNum(0, 1, 5) + Fraction(1, 2) == KNum(Fraction(1, 2), 1, 5)
    assert 3 * KNum(0, 1, 5) == KNum(0, 3, 5)
    with pytest.raises(FieldMismatch):
        _ = KNum(0, 1, 5) + KNum(2)
    assert KNum(2).in_field(5) + KNum(0, 1, 5) == KNum(2, 1, 5)


# -- wedge ----------------------------------------------------------------------


def test_wedge_basis_pair():
    assert wedgeK(1, sqrt5()) == WedgeNum(1, 5)


def test_wedge_self_vanishes():
    x = sqrt5(2, 3)
    assert wedgeK(x, x) == 0


def test_wedge_hand_expansion():
    # (2 + 3 sqrt5) ^ (7 - sqrt5) = (2 * (-1) - 3 * 7) (1 ^ sqrt5)
    assert wedgeK(sqrt5(2, 3), sqrt5(7, -1)) == WedgeNum(-23, 5)


def test_wedge_of_rationals_is_zero():
    assert wedgeK(Fraction(1, 3), 5) == 0
    assert WedgeNum(4, 1) == 0


@given(same_field_pair())
def test_wedge_antisymmetric(pair):
    x, y = pair
    assert wedgeK(x, y) == -wedgeK(y, x)


@given(same_field_pair(), rats)
def test_wedge_q_linear(pair, q):
    x, y = pair
    assert wedgeK(x * q, y) == wedgeK(x, y) * q


@given(same_field_pair())
def test_wedge_zero_iff_q_dependent(pair):
    x, y = pair
    dependent = x.a * y.b == x.b * y.a
    assert (wedgeK(x, y) == 0) == dependent


# -- conjugation, norm, sign ------------------------------------------------------


def test_conj_and_norm_fixtures():
    assert conj(3) == 3
    assert norm(sqrt5(2, 1)) == -1
    x = sqrt5(Fraction(1, 3), -2)
    assert conj(conj(x)) == x


@given(same_field_pair())
def test_norm_multiplicative(pair):
    x, y = pair
    assert norm(x * y) == norm(x) * norm(y)


@given(same_field_pair())
def test_conj_is_field_automorphism(pair):
    x, y = pair
    assert conj(x + y) == conj(x) + conj(y)
    assert conj(x * y) == conj(x) * conj(y)


def test_sign_fixtures():
    assert signK(sqrt5(2, -1)) == -1
    assert signK(KNum(0)) == 0
    assert signK(parse_knum("(-1+1*sqrt(17))/2")) == 1


@settings(max_examples=1000)
@given(knums())
def test_sign_matches_hundred_digit_decimal(x):
    with decimal.localcontext() as ctx:
        ctx.prec = 100
        val = decimal.Decimal(x.a.numerator) / x.a.denominator + (
            decimal.Decimal(x.b.numerator) / x.b.denominator
        ) * decimal.Decimal(x.f).sqrt()
    expected = (val > 0) - (val < 0)
    assert signK(x) == expected


@given(same_field_pair())
def test_ordering_is_total_and_consistent(pair):
    x, y = pair
    assert (x < y) + (x == y) + (x > y) == 1
    assert (x < y) == (signK(y - x) == 1)


@given(knums())
def test_inverse(x):
    if x:
        assert x * x.inverse() == 1


@given(knums())
def test_json_round_trip(x):
    assert KNum.from_json(x.to_json()) == x
    assert parse_knum(str(x), x.f) == x


def test_approx_digits():
    assert parse_knum("sqrt(2)").approx(10).startswith("1.41421356")


# -- K(i) -----------------------------------------------------------------------


def test_kinum_arithmetic():
    z = KiNum(1, 1, 5)
    assert z * z.cc() == 2
    w = KiNum(sqrt5(), 2)
    assert conjKi(w) == KiNum(sqrt5(0, -1), 2)
    assert (w / w) == 1


# -- J-invariant space ------------------------------------------------------------


def test_jwedge_basis():
    J = jWedge((1, 0), (0, 1))
    assert J == JNum([0, 1, 0, 0, 0, 0], 1)


def test_jxx_rational_vanishes():
    assert jxx(jWedge((Fraction(1, 2), 3), (7, Fraction(-2, 5)))) == 0


def test_jxx_sign():
    assert jxx(jWedge((sqrt5(), 0), (1, 0))) == WedgeNum(-1, 5)


@given(same_field_pair(), same_field_pair())
def test_jxx_projects_first_coordinates(p, q):
    (v1, v2), (w1, w2) = p, q
    if v1.f != w1.f:
        return
    assert jxx(jWedge((v1, v2), (w1, w2))) == wedgeK(v1, w1)


@given(same_field_pair())
def test_jwedge_alternating(p):
    v = p
    assert not jWedge(v, v)


def test_kmat_inverse_and_det():
    m = KMat2(1, sqrt5(), 0, 2, 5)
    assert m.det() == 2
    assert m * m.inverse() == KMat2.identity(5)
    assert not KMat2(1, 2, 2, 4).is_invertible()
