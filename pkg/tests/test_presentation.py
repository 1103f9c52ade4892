import pytest
from hypothesis import given, strategies as st

from malcev import (
    NilpotentPresentation,
    PresentationError,
    check_consistency,
    format_presentation,
    free_nilpotent,
    from_finite_presentation,
    hall_basis,
    parse_presentation,
    parse_word,
)
from malcev.freenil import MagnusSifter, witt_count
from malcev.presentation import format_word, invert_word, trivial_presentation

from conftest import DATA

HEIS_TEXT = (DATA / "heis.ngp").read_text()


def test_parse_heis(heis):
    assert heis.m == 3
    assert heis.nilpotency_class == 2
    assert heis.weights == (1, 1, 2)
    assert heis.torsion == {}
    assert heis.conj_tail(0, 1) == (0, 0, 1)
    assert heis.conj_tail(0, 2) == (0, 0, 0)
    # derived: a2^-1 a1 = a1 a2^-1 a3^-1
    assert heis.conj_inv_tails == {(0, 1): (0, 0, -1)}


def test_tail_touching_lower_index_is_rejected():
    with pytest.raises(PresentationError, match="tail touches index"):
        parse_presentation("gens 3\nweight 1 1\nweight 2 1\nweight 3 2\nconj 2 1 : 1 1\n")


def test_heis_with_torsion_parses_structurally():
    P = parse_presentation(HEIS_TEXT + "pow 2 2 :\n")
    assert P.exponents == (None, 2, None)
    assert P.power_tail(1) == (0, 0, 0)


@pytest.mark.parametrize(
    "text, message",
    [
        ("gens 2\nweight 1 2\nweight 2 1\n", "nondecreasing"),
        ("gens 1\nweight 1 1\npow 1 1 :\n", ">= 2"),
        ("weight 1 1\n", "'gens' must come first"),
        ("gens 2\nweight 1 1\n", "missing weight"),
        ("gens 2\nweight 1 1\nweight 2 1\nfrob 1\n", "unknown directive"),
        ("gens 2\nweight 1 1\nweight 2 1\nconj 1 2 :\n", "need i < j"),
        ("gens 3\nweight 1 1\nweight 2 1\nweight 3 1\nconj 2 1 : 1\n", "weight"),
    ],
)
def test_parse_errors(text, message):
    with pytest.raises(PresentationError, match=message):
        parse_presentation(text)


def test_parse_error_carries_position():
    with pytest.raises(PresentationError) as info:
        parse_presentation("gens 2\nweight 1 1\n  weight x 1\n")
    assert info.value.line == 3
    assert info.value.column == 3
    assert "line 3" in str(info.value)


def test_format_round_trip(heis, ut4, heis125):
    for P in (heis, ut4, heis125, free_nilpotent(3, 3).presentation):
        Q = parse_presentation(format_presentation(P))
        assert Q == P


def test_names_are_display_only():
    P = parse_presentation(HEIS_TEXT + "name 1 x\nname 2 y\nname 3 z\n")
    assert P.names == ("x", "y", "z")
    assert P == parse_presentation(HEIS_TEXT)
    assert parse_word("y x^-2", P.m, P.names) == ((1, 1), (0, -2))


def test_word_syntax():
    assert parse_word("a2 a1^-3 a2^0 a2^5", 3) == ((1, 1), (0, -3), (1, 5))
    assert parse_word("", 3) == ()
    assert parse_word("1", 3) == ()
    with pytest.raises(PresentationError):
        parse_word("a4", 3)
    with pytest.raises(PresentationError):
        parse_word("a1^", 3)
    assert format_word(((0, 1), (2, -4))) == "a1 a3^-4"
    assert invert_word(((0, 1), (2, -4))) == ((2, 4), (0, -1))


def test_trivial_group():
    P = trivial_presentation()
    assert P.m == 0
    assert P.collector.word_to_coords(()) == ()


# -- consistency ------------------------------------------------------------


def test_consistency_examples(heis, heis125, ut4):
    assert check_consistency(heis).consistent
    assert check_consistency(heis125).consistent
    assert check_consistency(ut4).consistent
    bad = check_consistency(parse_presentation(HEIS_TEXT + "pow 2 2 :\n"))
    assert not bad.consistent
    assert bad.witness == (0, 0, 2)  # a3^2 collects to a nontrivial element


def test_wrong_inverse_tail_is_detected():
    text = HEIS_TEXT + "conjinv 2 1 : 1\n"
    report = check_consistency(parse_presentation(text))
    assert not report
    assert report.witness_word is not None


def test_torsion_order_too_large_is_detected():
    # a1^2 = 1 but a2 a1 = a1 a2 a3 forces a3^2 = 1 as well; a3 declared free
    P = parse_presentation(HEIS_TEXT + "pow 1 2 :\n")
    assert not check_consistency(P)


# -- free nilpotent groups ---------------------------------------------------


def test_free_nilpotent_2_2(heis):
    P, basis = free_nilpotent(2, 2)
    assert P.m == 3
    assert P.weights == (1, 1, 2)
    assert P.conj_tails == {(0, 1): (0, 0, 1)}
    assert P.power_tails == {}
    assert [b.label(basis) for b in basis] == ["x1", "x2", "[x2, x1]"]
    assert P == heis


def test_free_nilpotent_2_3():
    P, basis = free_nilpotent(2, 3)
    assert P.m == 6
    assert P.weights == (1, 1, 1, 2, 2, 2)


def test_free_nilpotent_1_4():
    P, _ = free_nilpotent(1, 4)
    assert P.m == 4
    assert not P.conj_tails and not P.power_tails


@pytest.mark.parametrize("c,r", [(1, 1), (2, 1), (3, 2), (4, 2), (2, 4), (3, 3), (5, 2)])
def test_hall_basis_size_matches_witt(c, r):
    # witt_count is cumulative over weights 1..c
    basis = hall_basis(c, r)
    assert len(basis) == witt_count(c, r)
    for w in range(1, c + 1):
        layer = sum(1 for b in basis if b.weight == w)
        assert layer == witt_count(w, r) - witt_count(w - 1, r)


@pytest.mark.parametrize("c,r", [(2, 3), (3, 2), (3, 3), (4, 2), (5, 2)])
def test_free_nilpotent_is_consistent(c, r):
    assert check_consistency(free_nilpotent(c, r).presentation)


def test_free_nilpotent_resource_bound():
    with pytest.raises(MemoryError):
        free_nilpotent(6, 6, max_generators=100)
    with pytest.raises(ValueError):
        free_nilpotent(0, 2)


@given(st.lists(st.tuples(st.integers(0, 2), st.sampled_from([-2, -1, 1, 2])), max_size=12))
def test_free_nilpotent_collection_matches_magnus(w):
    # The Magnus embedding is an oracle independent of collection.
    P, basis = free_nilpotent(3, 3)
    sifter = MagnusSifter(basis, 3, 3)
    alg = sifter.A
    img = {(): 1}
    for g, e in w:
        img = alg.mul(img, alg.power(alg.generator(g), e))
    assert P.collector.word_to_coords(w) == sifter.coords(img)


# -- finite presentations ----------------------------------------------------


def test_from_finite_presentation_abelian_quotient():
    X = ["x", "y"]
    Q = from_finite_presentation(X, [parse_word("x^-1 y^-1 x y", names=X)], 2)
    P, iso = Q
    assert P.m == 2 and P.weights == (1, 1)
    assert not P.conj_tails and not P.power_tails
    assert Q.kernel.pivots == (2,)
    assert Q.kernel.rows == ((0, 0, 1),)
    assert iso == ((1, 0), (0, 1))
    assert Q.word_coords(parse_word("y x y", names=X)) == (1, 2)


def test_from_finite_presentation_cyclic():
    Q = from_finite_presentation(["x"], [((0, 5),)], 1)
    P, iso = Q
    assert P.m == 1
    assert P.exponents == (5,)
    assert P.power_tail(0) == (0,)
    assert iso == ((1,),)
    assert Q.word_coords(((0, 7),)) == (2,)


def test_from_finite_presentation_no_relators_is_free():
    for c, r in [(2, 2), (3, 2), (2, 3)]:
        P, _ = from_finite_presentation(r, [], c)
        assert P == free_nilpotent(c, r).presentation
        assert P.weights == free_nilpotent(c, r).presentation.weights


def test_from_finite_presentation_rejects_class_zero():
    with pytest.raises(ValueError):
        from_finite_presentation(2, [], 0)


def test_from_finite_presentation_heis_mod_5():
    X = ["x", "y"]
    rels = [parse_word(s, names=X) for s in ("x^5", "y^5")]
    Q = from_finite_presentation(X, rels, 2)
    P = Q.presentation
    assert check_consistency(P)
    order = 1
    for e in P.exponents:
        order *= e
    assert order == 125


words = st.lists(st.tuples(st.integers(0, 1), st.sampled_from([-3, -1, 1, 2])), min_size=1, max_size=6)


@given(st.lists(words, min_size=1, max_size=3), st.integers(1, 3))
def test_relators_vanish_in_quotient(relators, c):
    Q = from_finite_presentation(2, relators, c)
    assert check_consistency(Q.presentation)
    for r in relators:
        assert not any(Q.word_coords(r))
