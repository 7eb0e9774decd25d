from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flatcp.exactnum import KNum, WedgeNum, wedgeK
from flatcp.involutions import (
    EmptyRow,
    EqualLengths,
    GenPerm,
    InvolutionError,
    LinearInvolution,
    NotAPermutation,
    SameRightmostLetter,
    all_genperms,
    decideCompletePeriodicity,
    eraseCylinderLetter,
    exceptionalSetMembership,
    galoisFlux,
    hasConnection,
    inverseRauzySing,
    irreducible,
    isDecomposed,
    isTruePermutation,
    rauzy,
    rauzySing,
    relabel_canonical,
    replay_tree,
    rotation,
    saf,
    saf_via_double,
    translationLengths,
    validate,
)
from flatcp.involutions import rauzySing_perm

S5 = KNum(0, 1, 5)
seeds = st.integers(0, 2**32 - 1)


def P(text: str) -> GenPerm:
    return GenPerm.parse(text)


def k5(a, b=0) -> KNum:
    return KNum(a, b, 5)


# -- random involutions over Q(sqrt 5) -------------------------------------------


def random_involution(rng: random.Random, d: int, rational: bool = False) -> LinearInvolution:
    """A random generalized permutation admitting positive lengths, with
    random positive lengths in Q(sqrt 5) satisfying the row-sum condition."""
    letters = [chr(ord("A") + i) for i in range(d)]
    while True:
        word = letters * 2
        rng.shuffle(word)
        cut = rng.randint(1, 2 * d - 1)
        try:
            g = GenPerm(tuple(word[:cut]), tuple(word[cut:]))
        except InvolutionError:
            continue
        top_pairs = [s for s in g.alphabet if g.top.count(s) == 2]
        bottom_pairs = [s for s in g.alphabet if g.bottom.count(s) == 2]
        if bool(top_pairs) == bool(bottom_pairs):
            break
    lengths = {}
    for s in g.alphabet:
        lam = KNum(Fraction(rng.randint(1, 12), rng.randint(1, 4)), 0 if rational else Fraction(rng.randint(0, 6), rng.randint(1, 4)), 5)
        lengths[s] = lam
    if top_pairs:
        st_ = sum((lengths[s] for s in top_pairs), k5(0))
        sb = sum((lengths[s] for s in bottom_pairs), k5(0))
        for s in bottom_pairs:
            lengths[s] = lengths[s] * st_ / sb
    return LinearInvolution(g, lengths)


def first_return(T: LinearInvolution, bound: KNum, x: KNum, row: int, cap: int = 500):
    for _ in range(cap):
        x, row = T(x, row)
        if x < bound:
            return x, row
    raise AssertionError("no return")


def agrees_with_first_return(T: LinearInvolution, T2: LinearInvolution) -> bool:
    """``T2`` is the first return of ``T`` to ``[0, |T2|)`` on sample points."""
    bound = T2.total
    for r in (0, 1):
        starts = T2.starts(r)
        for i, s in enumerate(T2.perm.rows[r]):
            for frac in (Fraction(1, 3), Fraction(1, 2), Fraction(5, 7)):
                x = starts[i] + T2.lengths[s] * frac
                if first_return(T, bound, x, r) != T2(x, r):
                    return False
    return True


# -- validation -------------------------------------------------------------------


def test_validate_fixtures():
    T = validate(P("A A / B B"), {"A": 1, "B": 1})
    assert T.total == 2
    validate(P("A B / B A"), {"A": 1, "B": S5})
    with pytest.raises(InvolutionError, match="row sums"):
        validate(P("A A / B B"), {"A": 1, "B": 2})


def test_validate_rejects_bad_input():
    with pytest.raises(InvolutionError):
        P("A A A / B")
    with pytest.raises(EmptyRow):
        GenPerm((), ("A", "A"))
    with pytest.raises(InvolutionError, match="positive"):
        validate(P("A B / B A"), {"A": 1, "B": 0})
    with pytest.raises(InvolutionError, match="missing"):
        validate(P("A B / B A"), {"A": 1})


def test_true_permutation_fixtures():
    assert isTruePermutation(P("A B / B A"))
    assert not isTruePermutation(P("A A B C / D C B D"))
    assert isTruePermutation(P("A B C D / D C B A"))


# -- irreducibility ---------------------------------------------------------------


def test_irreducible_fixtures():
    assert irreducible(P("a B C D a b / b A D C A B"))
    assert not irreducible(P("a B C D a b / B A b C A D"))
    assert not irreducible(P("A B C D / B A D C"))
    assert irreducible(P("A B C D / D C B A"))
    assert irreducible(P("A A B C / C B D D"))


def test_irreducible_true_permutations_match_classical_criterion():
    # a true permutation is irreducible iff no proper prefix of the top row
    # is a prefix of the bottom row as a set
    for d in range(1, 6):
        for g in all_genperms(d):
            if not g.is_true_permutation():
                continue
            classical = all(set(g.top[:k]) != set(g.bottom[:k]) for k in range(1, d))
            assert irreducible(g) == classical, str(g)


@given(st.integers(1, 5), seeds)
def test_irreducibility_invariant_under_relabeling(d, seed):
    rng = random.Random(seed)
    perms = list(all_genperms(d))
    g = rng.choice(perms)
    names = list(g.alphabet)
    shuffled = names[:]
    rng.shuffle(shuffled)
    assert irreducible(g) == irreducible(g.relabel(dict(zip(names, shuffled))))


# -- Rauzy moves ------------------------------------------------------------------


def test_rauzy_fixtures():
    # the row sums force lambda_A = lambda_D
    g = P("A A B C / D C B D")
    big_c = LinearInvolution(g, {"A": 2, "B": 1, "C": 3, "D": 2})
    small_c = LinearInvolution(g, {"A": 3, "B": 1, "C": 2, "D": 3})
    assert rauzy(big_c)[0].perm == P("A A B C / D C D B")
    assert rauzy(small_c)[0].perm == P("A A B / C D C B D")
    equal = LinearInvolution(g, {"A": 2, "B": 1, "C": 2, "D": 2})
    with pytest.raises(EqualLengths):
        rauzy(equal)
    assert rauzySing(equal).perm == P("A A B / D D B")


def test_rauzy_on_rotation_is_euclid_step():
    T = rotation(k5(2, 1), k5(1))
    T2, step = rauzy(T)
    assert T2.perm == P("A B / B A")
    assert T2.lengths["A"] == k5(1, 1) and T2.lengths["B"] == k5(1)
    assert step.winner == "A" and step.loser == "B"
    assert agrees_with_first_return(T, T2)
    assert step.replay() == T2


def test_rauzy_sing_fixtures():
    T = LinearInvolution(P("A B C D a / B A D C a"), {"A": 1, "B": 2, "C": 3, "D": 4, "a": S5})
    assert eraseCylinderLetter(T).perm == P("A B C D / B A D C")
    assert rauzySing(rotation(1, 1)).perm == P("A / A")
    with pytest.raises(SameRightmostLetter):
        rauzy(T)


@settings(max_examples=150)
@given(st.integers(2, 7), seeds)
def test_rauzy_is_a_first_return(d, seed):
    rng = random.Random(seed)
    T = random_involution(rng, d)
    a, b = T.perm.top[-1], T.perm.bottom[-1]
    if a == b:
        return
    try:
        T2, _ = rauzy(T)
    except (EmptyRow, EqualLengths):
        return
    assert agrees_with_first_return(T, T2)


# -- inverse singular induction ---------------------------------------------------


def test_inverse_sing_contains_known_preimages():
    pre = {relabel_canonical(p) for p in inverseRauzySing(P("A B C D / B A D C"), "a")}
    assert relabel_canonical(P("A a C D a / B A D C B")) in pre
    assert relabel_canonical(P("A B C D a / a A D C B")) in pre
    # both rows ending with the new letter
    assert relabel_canonical(P("A B C D a / B A D C a")) in pre


def test_inverse_sing_rejects_existing_letter():
    with pytest.raises(InvolutionError):
        inverseRauzySing(P("A B / B A"), "A")


@pytest.mark.parametrize("d", [1, 2, 3, 4])
def test_inverse_sing_is_complete(d):
    """Compare with the forward images of every permutation on d+1 letters."""
    images: dict[GenPerm, set[GenPerm]] = {}
    for p in all_genperms(d + 1):
        try:
            q = relabel_canonical(rauzySing_perm(p))
        except InvolutionError:
            continue
        images.setdefault(q, set()).add(relabel_canonical(p))
    for g in all_genperms(d):
        got = {relabel_canonical(p) for p in inverseRauzySing(g, "a")}
        assert got == images.get(relabel_canonical(g), set()), str(g)


def test_inverse_then_forward_on_five_letters():
    rng = random.Random(5)
    perms = list(all_genperms(5))
    for g in rng.sample(perms, 40):
        for p in inverseRauzySing(g, "a"):
            assert relabel_canonical(rauzySing_perm(p)) == relabel_canonical(g)


def test_rauzy_sing_keeps_generalized_permutations():
    for d in range(2, 6):
        for g in all_genperms(d):
            if g.is_true_permutation() or not irreducible(g):
                continue
            try:
                image = rauzySing_perm(g)
            except InvolutionError:
                continue
            assert not image.is_true_permutation(), str(g)


# -- SAF, translations, flux ------------------------------------------------------


def test_saf_rotation():
    # lambda_A = 1, lambda_B = sqrt5; normalised to [0, 1) this is the
    # rotation by theta = sqrt5 / (1 + sqrt5)
    T = rotation(1, S5)
    assert saf(T) == 2 * wedgeK(1, S5)
    theta = S5 / (1 + S5)
    assert saf(rotation(1 - theta, theta)) == 2 * wedgeK(1, theta)


def test_saf_same_row_letters_only():
    T = LinearInvolution(P("A A / B B"), {"A": S5, "B": S5})
    assert saf(T) == 0
    assert saf_via_double(T) == 0


def test_translation_lengths_reverse_permutation():
    lam = {"A": k5(1), "B": S5, "C": k5(2, 1), "D": k5(Fraction(1, 2))}
    T = LinearInvolution(P("A B C D / D C B A"), lam)
    A, B, C, D = (lam[s] for s in "ABCD")
    t = translationLengths(T)
    assert t == {"A": B + C + D, "B": C + D - A, "C": D - A - B, "D": -A - B - C}
    expected = sum((wedgeK(lam[s], t[s]) for s in "ABCD"), WedgeNum(0, 5))
    assert saf(T) == expected


def test_translation_lengths_need_a_true_permutation():
    with pytest.raises(NotAPermutation):
        translationLengths(LinearInvolution(P("A A / B B"), {"A": 1, "B": 1}))


def test_galois_flux_fixtures():
    assert galoisFlux(LinearInvolution(P("A B / A B"), {"A": S5, "B": 1})) == 0
    # t_A = 3 - sqrt5, t_B = 1 - sqrt5; hand expansion gives 4 sqrt5
    T = rotation(k5(-1, 1), k5(3, -1))
    assert galoisFlux(T) == k5(0, 4)


@settings(max_examples=200)
@given(st.integers(1, 7), seeds)
def test_saf_matches_double(d, seed):
    rng = random.Random(seed)
    T = random_involution(rng, d)
    assert saf(T) == saf_via_double(T)


@settings(max_examples=200)
@given(st.integers(1, 7), seeds)
def test_saf_of_true_permutation_is_classical(d, seed):
    rng = random.Random(seed)
    T = random_involution(rng, d)
    if not T.perm.is_true_permutation():
        return
    t = translationLengths(T)
    assert saf(T) == sum((wedgeK(T.lengths[s], t[s]) for s in T.perm.alphabet), WedgeNum(0, 5))


@settings(max_examples=200)
@given(st.integers(2, 7), seeds)
def test_saf_invariant_under_induction(d, seed):
    rng = random.Random(seed)
    T = random_involution(rng, d)
    a, b = T.perm.top[-1], T.perm.bottom[-1]
    if a == b:
        assert saf(eraseCylinderLetter(T)) == saf(T)
        return
    try:
        T2, _ = rauzy(T)
    except (EqualLengths, EmptyRow):
        return
    assert saf(T2) == saf(T)
    # force equal rightmost lengths and check the singular move
    lengths = dict(T.lengths)
    lengths[a] = lengths[b] = lengths[a] + lengths[b]
    try:
        Ts = LinearInvolution(T.perm, lengths)
        T3 = rauzySing(Ts)
    except InvolutionError:
        return
    assert saf(T3) == saf(Ts)


# -- decomposition and connections ------------------------------------------------


def test_is_decomposed_fixtures():
    T = LinearInvolution(P("E A B C D / E B A D C"), {s: k5(i + 1) for i, s in enumerate("EABCD")})
    t1, t2 = isDecomposed(T)
    assert t1.perm == P("E / E") and t2.perm == P("A B C D / B A D C")
    assert isDecomposed(rotation(1, S5)) is None


def hidden_rotation_involution() -> LinearInvolution:
    """(0 0 1 1 3 4 / 2 2 4 3) with lambda_2 = lambda_0 + lambda_1, an
    irrational rotation block and total SAF zero."""
    lam = {"0": k5(1), "1": S5, "2": k5(1, 1), "3": S5, "4": k5(2)}
    return LinearInvolution(P("0 0 1 1 3 4 / 2 2 4 3"), lam)


def test_hidden_rotation_split():
    T = hidden_rotation_involution()
    t1, t2 = isDecomposed(T)
    assert set(t1.perm.alphabet) == {"0", "1", "2"}
    assert t2.perm == P("3 4 / 4 3")
    assert saf(T) == saf(t1) + saf(t2) == 0
    assert saf(t2) != 0


def test_has_connection():
    conn = hasConnection(rotation(Fraction(2, 3), Fraction(1, 3)), 10)
    assert conn is not None and conn.length <= 3
    assert hasConnection(rotation(k5(3, -1), k5(-2, 1)), 300) is None
    assert hasConnection(hidden_rotation_involution(), 5) is not None


# -- decision procedure -----------------------------------------------------------


def test_decide_rational_rotation():
    v = decideCompletePeriodicity(rotation(Fraction(2, 3), Fraction(1, 3)))
    assert v.kind == "CP"
    assert replay_tree(v.tree)


def test_decide_irrational_rotation():
    v = decideCompletePeriodicity(rotation(1, S5))
    assert v.kind == "NotCP"
    assert saf(v.certificate) == 2 * wedgeK(1, S5)


def test_decide_hidden_rotation():
    v = decideCompletePeriodicity(hidden_rotation_involution())
    assert v.kind == "NotCP"
    assert v.certificate.perm == P("3 4 / 4 3")
    assert saf(v.certificate) != 0


def test_decide_budget_gives_inconclusive():
    # SAF vanishes (rational lengths) but one step is not enough
    T = LinearInvolution(P("A B C / C B A"), {"A": 5, "B": 3, "C": 2})
    assert decideCompletePeriodicity(T, budget=0).kind == "Inconclusive"
    assert decideCompletePeriodicity(T).kind == "CP"


@settings(max_examples=80)
@given(st.integers(2, 6), seeds)
def test_verdict_stable_under_symmetries(d, seed):
    rng = random.Random(seed)
    # rational lengths make CP outcomes common
    T = random_involution(rng, d, rational=rng.random() < 0.5)
    v = decideCompletePeriodicity(T, budget=2000)
    if v.kind == "CP":
        assert saf(T) == 0
        assert replay_tree(v.tree)
    if v.kind == "NotCP":
        assert saf(v.certificate) != 0
    names = list(T.perm.alphabet)
    shuffled = names[:]
    rng.shuffle(shuffled)
    relabeled = T.relabel(dict(zip(names, shuffled)))
    assert decideCompletePeriodicity(relabeled, budget=2000).kind == v.kind
    assert decideCompletePeriodicity(T.swap_rows(), budget=2000).kind == v.kind
    assert decideCompletePeriodicity(T.scale(Fraction(rng.randint(1, 9), rng.randint(1, 9))), budget=2000).kind == v.kind


# -- exceptional sets -------------------------------------------------------------


def test_exceptional_sets():
    assert exceptionalSetMembership(P("A B C D a / a A D C B")) == "E1"
    assert exceptionalSetMembership(P("a B C D a / B A D C A")) == "E2"
    assert exceptionalSetMembership(P("A B C D E / B A D C E")) == "E3"
    assert exceptionalSetMembership(P("A B C D E / E D C B A")) is None
    with pytest.raises(InvolutionError):
        exceptionalSetMembership(P("A B / B A"))


def test_exceptional_sets_up_to_relabeling():
    g = P("A B C D a / a A D C B").relabel({"A": "q", "B": "r", "C": "s", "D": "t", "a": "u"})
    assert exceptionalSetMembership(g) == "E1"


def test_json_round_trip():
    T = hidden_rotation_involution()
    assert LinearInvolution.from_json(T.to_json()) == T
