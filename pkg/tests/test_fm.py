from __future__ import annotations

from fractions import Fraction

from hypothesis import given
from hypothesis import strategies as st

from flatcp import fm
from flatcp.exactnum import KNum

small = st.integers(-5, 5)


def _holds(cons, x):
    for a, b, op in cons:
        v = sum((c * xi for c, xi in zip(a, x)), Fraction(0)) - b
        ok = {">": v > 0, ">=": v >= 0, "<": v < 0, "<=": v <= 0, "=": v == 0}[op]
        if not ok:
            return False
    return True


def test_open_triangle():
    cons = [((1, 0), 0, ">"), ((0, 1), 0, ">"), ((1, 1), 1, "<")]
    x = fm.solve(cons, 2)
    assert x is not None and _holds(cons, x)


def test_strict_pair_is_infeasible():
    assert not fm.feasible([((1,), 0, ">"), ((1,), 0, "<")], 1)


def test_weak_pair_touches():
    assert fm.solve([((1,), 0, ">="), ((1,), 0, "<=")], 1) == [0]


def test_equalities_are_respected():
    cons = [((1, 1, 1), 6, "="), ((1, -1, 0), 0, ">"), ((0, 1, -1), 0, ">"), ((0, 0, 1), 0, ">")]
    x = fm.solve(cons, 3)
    assert _holds(cons, x)


def test_deterministic():
    cons = [((2, -1), 1, ">"), ((1, 3), 4, "<"), ((0, 1), -2, ">")]
    assert fm.solve(cons, 2) == fm.solve(list(cons), 2)


def test_quadratic_field_coefficients():
    s5 = KNum(0, 1, 5)
    # x > sqrt5 and x < 3 has rational points, e.g. between 2.24 and 3
    x = fm.solve([((1,), s5, ">"), ((1,), 3, "<")], 1)
    assert x is not None and s5 < x[0] < 3


@st.composite
def systems_with_witness(draw):
    n = draw(st.integers(1, 4))
    x0 = [Fraction(draw(st.integers(-6, 6)), draw(st.integers(1, 4))) for _ in range(n)]
    cons = []
    for _ in range(draw(st.integers(1, 7))):
        a = [draw(small) for _ in range(n)]
        val = sum((c * xi for c, xi in zip(a, x0)), Fraction(0))
        op = draw(st.sampled_from([">", "<", ">=", "<=", "="]))
        slack = Fraction(draw(st.integers(1, 3)), 2)
        b = {">": val - slack, "<": val + slack, ">=": val, "<=": val, "=": val}[op]
        cons.append((a, b, op))
    return n, cons


@given(systems_with_witness())
def test_systems_with_a_witness_are_solved(sys_):
    n, cons = sys_
    x = fm.solve(cons, n)
    assert x is not None
    assert _holds(cons, x)


@given(systems_with_witness(), st.integers(0, 3))
def test_contradiction_detected(sys_, k):
    n, cons = sys_
    k = k % n
    a = [int(i == k) for i in range(n)]
    cons = cons + [(a, 0, ">"), (a, 0, "<")]
    assert fm.solve(cons, n) is None
