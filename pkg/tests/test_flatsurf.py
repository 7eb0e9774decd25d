from __future__ import annotations

from fractions import Fraction

import pytest
from conftest import SQRT17
from hypothesis import given, settings
from hypothesis import strategies as st

from flatcp.exactnum import KiNum, KMat2, KNum, WedgeNum, squarefree_part
from flatcp.flatsurf import (
    EndoMatrix,
    NotInTable,
    PrototypeParams,
    STRATA_TABLE,
    SurfaceError,
    TransversalPiece,
    buildSurface,
    checkEigenform,
    commensurability,
    complexFlux,
    cover_orders,
    crossSection,
    cylinderDecomposition,
    euler_characteristic,
    fluxForm,
    homologyBasis,
    identities_for,
    kernelMove,
    kernel_epsilon,
    minus_rank,
    omega_wedge_conj,
    orientationDoubleCover,
    prototypeP112,
    prototype_quotient,
    safDirection,
    safVertical,
    strataTable,
    tuneKernelParameter,
)
from flatcp.flatsurf.homology import periods
from flatcp.flatsurf.prototype import _GLUINGS
from flatcp.involutions import galoisFlux, saf

GRID = [(2, 1, -1), (1, 1, -3), (2, 2, -3), (3, 1, -2), (3, 1, 0), (4, 1, 1), (5, 1, 2), (2, 1, -4), (3, 2, -5), (6, 1, 3)]


def lam_of(w: int, h: int, e: int) -> KNum:
    c, f = squarefree_part(e * e + 8 * w * h)
    return (KNum(e, 0, f) + KNum(0, c, f)) / 2


def grid_params():
    for w, h, e in GRID:
        lam = lam_of(w, h, e)
        for frac in (Fraction(1, 3), Fraction(1, 4)):
            yield PrototypeParams(w, h, e, lam * frac)


def shear(s, f: int) -> KMat2:
    return KMat2(KNum(1, 0, f), s, KNum(0, 0, f), KNum(1, 0, f))


# -- construction -----------------------------------------------------------------


def test_torus(torus):
    assert torus.stratum_name() == "H(0)"
    assert torus.genus == 1
    assert torus.area() == 1
    assert len(homologyBasis(torus).cycles) == 2
    decomp = cylinderDecomposition(torus, (0, 1))
    assert len(decomp.cylinders) == 1
    assert decomp.cylinders[0].w == 1 and decomp.cylinders[0].h == 1


def test_build_rejects_clockwise_polygon():
    one, zero = KNum(1), KNum(0)
    cw = [(zero, zero), (zero, one), (one, one), (one, zero)]
    with pytest.raises(SurfaceError):
        buildSurface([cw], [((0, 0), (0, 2), 1), ((0, 1), (0, 3), 1)])


def test_build_rejects_mismatched_sides():
    one, zero, two = KNum(1), KNum(0), KNum(2)
    rect = [(zero, zero), (two, zero), (two, one), (zero, one)]
    with pytest.raises(SurfaceError):
        buildSurface([rect], [((0, 0), (0, 1), 1), ((0, 2), (0, 3), 1)])


def test_surface_json_round_trip(prototype):
    _, S, _, _ = prototype
    from flatcp.flatsurf import FlatSurface

    assert FlatSurface.from_json(S.to_json()).to_json() == S.to_json()


# -- the prototype ------------------------------------------------------------------


def test_prototype_stratum_and_homology(prototype):
    params, S, prym, _ = prototype
    assert params.D == 17 and params.lam == (SQRT17 - 1) / 2
    assert S.stratum_name() == "H(1,1,2)"
    assert S.genus == 3
    assert len(homologyBasis(S).cycles) == 6
    assert prym.intersectionMatrix == ((0, 1, 0, 0), (-1, 0, 0, 0), (0, 0, 0, 2), (0, 0, -2, 0))


def test_prototype_parameter_validation():
    with pytest.raises(ValueError):
        PrototypeParams(2, 1, 0, KNum(1))  # e + 2h = w
    with pytest.raises(ValueError):
        PrototypeParams(2, 2, -4, KNum(1))  # gcd 2
    with pytest.raises(ValueError):
        PrototypeParams(2, 1, -1, lam_of(2, 1, -1))  # t = lambda


def test_prototype_quotient_and_cover(prototype):
    params, _, _, _ = prototype
    Y = prototype_quotient(params)
    assert Y.stratum_name() == "Q(-1^3,1,2)"
    X, deck = orientationDoubleCover(Y)
    assert X.stratum_name() == "H(1,1,2)"
    assert minus_rank(X, deck) == 4
    assert euler_characteristic(X) == 2 - 2 * 3


def test_double_cover_of_pillowcase():
    # a 2x1 rectangle with each side folded in half: four poles
    z, one, two, half = KNum(0), KNum(1), KNum(2), KNum(Fraction(1, 2))
    octagon = [(z, z), (one, z), (two, z), (two, half), (two, one), (one, one), (z, one), (z, half)]
    P = buildSurface([octagon], [((0, 2 * k), (0, 2 * k + 1), -1) for k in range(4)])
    assert P.stratum_name() == "Q(-1^4)"
    X, deck = orientationDoubleCover(P)
    assert X.stratum_name() == "H(0)"
    assert minus_rank(X, deck) == 2


@pytest.mark.parametrize("params", list(grid_params()), ids=str)
def test_eigenform_on_grid(params):
    S, prym, T = prototypeP112(params)
    rep = checkEigenform(S, prym, T, params.D)
    assert rep.passed, rep.failure
    assert rep.eigenvalue == params.lam


def test_eigenform_rejects_mutants(prototype):
    params, S, prym, T = prototype
    identity = EndoMatrix(tuple(tuple(int(i == j) for j in range(4)) for i in range(4)))
    assert not checkEigenform(S, prym, identity, params.D).passed
    swapped = EndoMatrix(((-1, 0, 1, 0), (0, -1, 0, 2), (2, 0, 0, 0), (0, 4, 0, 0)))
    rep = checkEigenform(S, prym, swapped, params.D)
    assert not rep.passed
    transposed = EndoMatrix(tuple(zip(*T.rows)))
    assert not checkEigenform(S, prym, transposed, params.D).passed


# -- cylinders and flux -------------------------------------------------------------


def test_vertical_cylinders_of_prototype(prototype):
    params, S, _, _ = prototype
    lam, t = params.lam, params.t
    decomp = cylinderDecomposition(S, (0, 1))
    assert decomp.stable
    moduli = sorted((c.mu for c in decomp.cylinders), key=lambda m: (m.a, m.b))
    # the square splits into the strip over eta (width t) and the two side
    # strips; each rectangle column is its own cylinder
    assert t / lam in moduli
    assert len(decomp.cylinders) == 5
    assert not commensurability(decomp).commensurable


def test_flux_identities_hold_against_the_computed_flux(prototype):
    _, S, _, _ = prototype
    decomp, rep = identities_for(S, (0, 1))
    assert all(rep.passed.values())
    assert omega_wedge_conj(S) == 0


def test_literal_prototype_flux_is_not_zero(prototype):
    params, S, _, _ = prototype
    # frozen: the flux of the literal 16-gon is -3 i w h
    assert complexFlux(S) == KiNum(0, -3 * params.w * params.h, S.f)


def eigen_variant(params: PrototypeParams):
    """The same 16-gon with (h x w) rectangles; independent check surface
    with vanishing flux."""
    lam, t, f = params.lam, params.t, params.field
    W, H = KNum(params.h, 0, f), KNum(params.w, 0, f)
    a = (lam - t) / 2
    z = KNum(0, 0, f)
    poly = [
        (a - W, z), (a - W, -H), (z, -H), (a, -H), (a, z), (a + t, z), (lam, z), (lam, lam),
        (lam - a + W, lam), (lam - a + W, lam + H), (lam, lam + H), (lam - a, lam + H),
        (lam - a, lam), (a, lam), (z, lam), (z, z),
    ]  # fmt: skip
    return buildSurface([poly], [((0, i), (0, j), 1) for i, j in _GLUINGS], field=f)


SLOPES = ["0", "1", "-1", "1/2", "-3", "sqrt(17)", "(1+sqrt(17))/2", "(-1+sqrt(17))/6", "(3-sqrt(17))/4"]


@pytest.mark.parametrize("slope", SLOPES + [None])
def test_eigen_variant_is_completely_algebraically_periodic(slope):
    lam = lam_of(2, 1, -1)
    params = PrototypeParams(2, 1, -1, lam / 3)
    X = eigen_variant(params)
    assert complexFlux(X) == 0
    assert safDirection(X, slope) == 0


def test_literal_prototype_saf_by_slope(prototype):
    params, S, _, _ = prototype
    for k in ["0", "1", "-1", "2/3", "inf"]:
        assert safDirection(S, k) == 0
    # frozen: the slope lambda direction has non-zero SAF
    assert safDirection(S, params.lam) == WedgeNum(Fraction(3, 4), 17)


@settings(max_examples=25)
@given(st.integers(-6, 6), st.integers(1, 6))
def test_rational_slopes_have_zero_saf(p, q):
    lam = lam_of(2, 1, -1)
    S, _, _ = prototypeP112(PrototypeParams(2, 1, -1, lam / 4))
    assert safDirection(S, Fraction(p, q)) == 0


# -- kernel moves -------------------------------------------------------------------


def test_kernel_move_keeps_periods_and_saf(prototype):
    _, S, _, _ = prototype
    eps = kernel_epsilon(S)
    moved = kernelMove(S, (eps / 2, -eps / 3))
    assert periods(moved) == periods(S)
    assert safVertical(moved) == safVertical(S)
    assert moved.stratum_name() == "H(1,1,2)"
    with pytest.raises(SurfaceError):
        kernelMove(S, (eps, 0))


@settings(max_examples=20)
@given(st.fractions(-0.99, 0.99), st.fractions(-0.99, 0.99))
def test_kernel_move_property(u, v):
    lam = lam_of(2, 1, -1)
    S, _, _ = prototypeP112(PrototypeParams(2, 1, -1, lam / 3))
    eps = kernel_epsilon(S)
    moved = kernelMove(S, (eps * u, eps * v))
    assert periods(moved) == periods(S)
    assert safVertical(moved) == safVertical(S)


def test_tune_kernel_parameter_hits_requested_ratio():
    h = [KNum(1), KNum(2)]
    w = [KNum(3), KNum(5)]
    t = tuneKernelParameter(h, w, [1, -1], q=Fraction(1, 2))
    r = ((h[0] + t) / w[0]) / ((h[1] - t) / w[1])
    assert r == Fraction(1, 2)
    with pytest.raises(ValueError):
        tuneKernelParameter(h, w, [1, 1])


# -- strata ---------------------------------------------------------------------


def test_strata_table_lookups():
    assert strataTable("Q(8)").prym == "Prym(4,4)^even"
    assert strataTable("Q(2,-1,1,-1,-1)").index == 5
    assert strataTable("Prym(2,2)").quadratic == "Q(-1^4,4)"
    with pytest.raises(NotInTable):
        strataTable("Q(4)")


@pytest.mark.parametrize("row", STRATA_TABLE, ids=lambda r: r.quadratic)
def test_strata_rows_are_consistent(row):
    q = row.quadratic_orders
    # dimension: 2 g_Q - 2 + n = 5 where sum(orders) = 4 g_Q - 4
    g_q = (sum(q) + 4) // 4
    assert 2 * g_q - 2 + len(q) == 5
    assert cover_orders(q) == row.prym_orders
    # Riemann-Hurwitz for the cover
    assert sum(row.prym_orders) == 2 * row.genus - 2


# -- cross sections ---------------------------------------------------------------


@pytest.mark.parametrize("s", ["1/3", "sqrt(5)-2"])
def test_sheared_torus_is_a_rotation(s):
    from flatcp.exactnum import parse_knum

    s = parse_knum(s, 5)
    one, zero = KNum(1, 0, 5), KNum(0, 0, 5)
    T2 = buildSurface(
        [[(zero, zero), (one, zero), (one + s, one), (s, one)]],
        [((0, 0), (0, 2), 1), ((0, 1), (0, 3), 1)],
        field=5,
    )
    I = crossSection(T2, [TransversalPiece(0, one / 2, s / 2, one + s / 2)]).involution
    # flowing up by one and returning by the top side translates by -s
    for frac in (Fraction(1, 7), Fraction(1, 2), Fraction(6, 7)):
        x = one * frac
        y = x - s
        y = y + 1 if y < 0 else y
        assert I(x, 0) == (y, 0)
    assert saf(I) == -safVertical(T2)


def test_prototype_cross_section_matches_surface_invariants():
    lam = lam_of(2, 1, -1)
    params = PrototypeParams(2, 1, -1, lam / 3)
    S0, _, _ = prototypeP112(params)
    f = params.field
    W, H = KNum(1, 0, f), KNum(Fraction(1, 2), 0, f)
    a = (lam - params.t) / 2
    for s in (KNum(Fraction(1, 2), 0, f), lam / 5):
        S = S0.transform(shear(s, f))
        pieces = [
            TransversalPiece(0, lam / 2, s * lam / 2, lam + s * lam / 2),
            TransversalPiece(0, -H / 2, a - W + s * (-H / 2), s * (-H / 2)),
            TransversalPiece(0, lam + H / 2, lam + s * (lam + H / 2), lam - a + W + s * (lam + H / 2)),
        ]
        I = crossSection(S, pieces).involution
        assert galoisFlux(I) == fluxForm(S, None, "re")
        assert saf(I) == -safVertical(S)
    assert fluxForm(S, None, "re") == -Fraction(3, 5) * SQRT17
