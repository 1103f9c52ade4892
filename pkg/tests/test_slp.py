import random

import pytest
from hypothesis import given, strategies as st

from malcev import PresentationError, Slp, coords_to_slp, parse_slp, power, power_program, slp_to_coords, word_to_coords
from malcev.slp import format_slp, random_slp, word_program


def doubling(letter: str, depth: int) -> str:
    lines = [f"term B1 {letter}"]
    lines += [f"prod B{k} B{k - 1} B{k - 1}" for k in range(2, depth + 1)]
    lines.append(f"root B{depth}")
    return "\n".join(lines)


def test_parse_doubling():
    A = parse_slp("term B1 a1; prod B2 B1 B1; prod B3 B2 B2; root B3")
    assert A.size == 3
    assert A.expand() == ((0, 1),) * 4
    assert A.depth() == 2


def test_parse_empty_word():
    A = parse_slp("term B1 eps; root B1")
    assert A.expand() == ()


@pytest.mark.parametrize(
    "text, message",
    [
        ("prod B1 B1 B1", "child not smaller"),
        ("term B1 a1; prod B2 B1 B3; term B3 a2; root B2", "forward reference"),
        ("term B1 a1; term B1 a2; root B1", "multiple productions"),
        ("term B1 a1", "missing root"),
        ("term B1 a1; root B2", "no production"),
        ("term B1 a1^2; root B1", "bad letter"),
    ],
)
def test_parse_errors(text, message):
    with pytest.raises(PresentationError, match=message):
        parse_slp(text)


def test_unreachable_productions_are_dropped():
    A = parse_slp("term X a2; term Y a1; prod Z Y Y; root Z")
    assert A.size == 2
    assert A.names == ("Y", "Z")


def test_format_round_trip():
    A = parse_slp("term B1 a1; term B2 a3^-1; prod B3 B1 B2; prod B4 B3 B3; root B4")
    assert parse_slp(format_slp(A)) == A


def test_slp_to_coords_examples(heis):
    assert slp_to_coords(heis, parse_slp(doubling("a1", 21))) == (2**20, 0, 0)
    assert slp_to_coords(heis, parse_slp("term E eps; root E")) == (0, 0, 0)
    for k in (1, 5, 40):
        A = power_program(((0, 1), (1, 1)), 2**k)
        n = 2**k
        assert slp_to_coords(heis, A) == (n, n, 2 ** (k - 1) * (n - 1))
        assert slp_to_coords(heis, A) == power(heis, (1, 1, 0), n)


def test_power_program_examples(heis):
    A = power_program(((0, 1),), 2**20)
    assert A.size <= 43
    assert slp_to_coords(heis, A) == (2**20, 0, 0)
    assert power_program(((0, 1), (1, 1)), 1).expand() == ((0, 1), (1, 1))
    w = ((0, 1), (1, 1), (2, 1))
    B = power_program(w, 5)
    assert B.expand() == w * 5


def test_power_program_size_bound():
    from math import ceil, log2

    for length in (1, 2, 3, 7, 16, 33):
        for n in (1, 2, 3, 1000, 2**31 - 1):
            w = tuple((i % 3, 1) for i in range(length))
            bound = length + ceil(log2(length)) + 2 * ceil(log2(n)) + 2
            assert power_program(w, n).size <= bound


def test_coords_to_slp_examples(heis):
    A = coords_to_slp(heis, (3, 0, 0))
    assert A.size <= 6
    assert A.expand() == ((0, 1),) * 3
    assert coords_to_slp(heis, (0, 0, 0)).expand() == ()
    B = coords_to_slp(heis, (2**20, 1, 0))
    assert B.size <= 50
    assert slp_to_coords(heis, B) == (2**20, 1, 0)


@pytest.mark.parametrize("name", ["heis", "ut4", "heis125"])
def test_coords_round_trip(request, name):
    P = request.getfixturevalue(name)

    @given(st.tuples(*[st.integers(-(2**64), 2**64)] * P.m))
    def check(raw):
        g = P.collector.normalize_torsion(raw)
        assert slp_to_coords(P, coords_to_slp(P, g)) == g

    check()


@pytest.mark.parametrize("name", ["heis", "ut4"])
def test_power_program_consistency(request, name):
    P = request.getfixturevalue(name)
    rng = random.Random(13)
    for _ in range(40):
        w = tuple((rng.randrange(P.m), rng.choice([-1, 1])) for _ in range(rng.randint(1, 64)))
        n = rng.randint(1, 32)
        assert slp_to_coords(P, power_program(w, n)) == power(P, word_to_coords(P, w), n)


@pytest.mark.parametrize("name", ["heis", "ut4", "heis125"])
def test_random_programs_match_expansion(request, name):
    P = request.getfixturevalue(name)
    rng = random.Random(17)
    for _ in range(60):
        A = random_slp(rng, P.m, rng.randint(1, 14))
        assert slp_to_coords(P, A) == word_to_coords(P, A.expand())


def test_word_program(ut4):
    w = ((0, 5), (3, -7), (5, 2**40))
    A = word_program(w)
    assert slp_to_coords(ut4, A) == word_to_coords(ut4, w)
    assert A.size < 120


def test_slp_rejects_bad_children():
    with pytest.raises(PresentationError):
        Slp((("term", (0, 1)), ("prod", 0, 2)))
