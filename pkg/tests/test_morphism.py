import random
from itertools import product

import pytest

from malcev import (
    Homomorphism,
    NotInImage,
    check_consistency,
    direct_product,
    from_finite_presentation,
    kernel_and_image,
    membership,
    parse_word,
    preimage,
    reduce_to_full_form,
    word_witness,
)
from malcev.morphism import apply, conjugates_to_word, relation_failures
from malcev.subgroup import group_order


def test_direct_product_examples(z2, heis):
    Z = z2.truncate(1)
    P = direct_product(Z, Z).presentation
    assert P.m == 2 and not P.conj_tails and not P.power_tails
    D = direct_product(Z, heis)
    P = D.presentation
    assert P.m == 4
    col = P.collector
    rng = random.Random(0)
    for _ in range(20):
        g = tuple(rng.randint(-5, 5) for _ in range(4))
        assert col.multiply((1, 0, 0, 0), g) == col.multiply(g, (1, 0, 0, 0))
    assert check_consistency(P)


def test_product_multiplies_blockwise(heis):
    D = direct_product(heis, heis)
    col = D.presentation.collector
    assert D.presentation.m == 6 and check_consistency(D.presentation)
    rng = random.Random(1)
    for _ in range(100):
        x = tuple(rng.randint(-50, 50) for _ in range(6))
        y = tuple(rng.randint(-50, 50) for _ in range(6))
        (x1, x2), (y1, y2) = D.split(x), D.split(y)
        assert col.multiply(x, y) == D.embed(heis.collector.multiply(x1, y1), heis.collector.multiply(x2, y2))


def test_product_with_torsion_is_consistent(heis125, z5, ut4):
    for H, G in [(heis125, z5), (z5, heis125), (ut4, heis125), (heis125, ut4)]:
        assert check_consistency(direct_product(H, G).presentation)


@pytest.fixture(scope="module")
def z(z2):
    return z2.truncate(1)


def test_kernel_examples(heis, z):
    phi = Homomorphism.from_images(heis, z, [(1,), (1,), (0,)])
    ker, im = kernel_and_image(phi)
    assert ker.rows == ((1, -1, 0), (0, 0, 1)) and ker.pivots == (0, 2)
    assert im.rows == ((1,),)
    ident = Homomorphism.from_images(heis, heis, [heis.unit(i) for i in range(3)])
    ker, im = kernel_and_image(ident)
    assert ker.rows == () and len(im.rows) == 3
    zero = Homomorphism.from_images(z, z, [(0,)])
    ker, im = kernel_and_image(zero)
    assert ker.rows == ((1,),) and im.rows == ()


def test_preimage_examples(heis, z, z5):
    phi = Homomorphism.from_images(heis, z, [(1,), (1,), (0,)])
    g = preimage(phi, (1,))
    assert g[0] + g[1] == 1
    assert preimage(phi, (0,)) == (0, 0, 0)
    red = Homomorphism.from_images(z, z5, [(1,)])
    assert preimage(red, (3,))[0] % 5 == 3


def test_not_in_image(heis, z):
    phi = Homomorphism(heis, z, (((1, 0, 0), (2,)),))
    with pytest.raises(NotInImage):
        preimage(phi, (1,))


def test_relation_failures(heis, heis125, z, z5):
    good = Homomorphism.from_images(heis, z, [(1,), (1,), (0,)])
    assert relation_failures(good) == []
    bad = Homomorphism.from_images(z5, z, [(1,)])
    assert relation_failures(bad) == [((0, 5),)]
    # the abelianization of the 125-quotient is well defined
    ab = Homomorphism.from_images(heis125, direct_product(z5, z5).presentation, [(1, 0), (0, 1), (0, 0)])
    assert relation_failures(ab) == []


def _enumerate(P):
    return [P.collector.normalize_torsion(g) for g in product(*[range(e) for e in P.exponents])]


def test_abelianization_of_finite_quotient(heis125, z5):
    Z55 = direct_product(z5, z5).presentation
    phi = Homomorphism.from_images(heis125, Z55, [(1, 0), (0, 1), (0, 0)])
    ker, im = kernel_and_image(phi)
    for u in ker.rows:
        assert apply(phi, u) == Z55.identity()
    k = sum(1 for g in _enumerate(heis125) if membership(heis125, ker, g) is not None)
    i = sum(1 for h in _enumerate(Z55) if membership(Z55, im, h) is not None)
    assert (k, i) == (5, 25)
    assert k * i == 125


@pytest.mark.parametrize("name", ["heis", "ut4", "heis125"])
def test_preimage_inverts_phi(request, name):
    P = request.getfixturevalue(name)
    col = P.collector
    rng = random.Random(2)
    # conjugation by a fixed element is an automorphism
    x = col.normalize_torsion(tuple(rng.randint(-2, 2) for _ in range(P.m)))
    phi = Homomorphism.from_images(P, P, [col.conjugate(P.unit(i), x) for i in range(P.m)])
    ki = kernel_and_image(phi)
    assert ki.kernel.rows == ()
    for _ in range(100):
        h = col.normalize_torsion(tuple(rng.randint(-9, 9) for _ in range(P.m)))
        g = preimage(phi, h, ki)
        assert col.conjugate(g, x) == h


def test_kernel_rows_map_to_identity(heis, ut4):
    rng = random.Random(3)
    for _ in range(10):
        imgs = [tuple(rng.randint(-2, 2) for _ in range(3)) for _ in range(2)]
        # ut4 -> heis killing a3 and the commutators through it
        phi = Homomorphism(ut4, heis, ((ut4.unit(0), imgs[0]), (ut4.unit(1), imgs[1])))
        ker, im = kernel_and_image(phi)
        for u in ker.rows:
            assert apply(phi, u) == heis.identity()
        for v in im.rows:
            assert apply(phi, preimage(phi, v)) == v


# -- word problem witnesses ----------------------------------------------------


def test_witness_power_of_relator():
    Q = from_finite_presentation(["x"], [((0, 5),)], 1)
    res = word_witness(Q, ((0, 10),))
    assert res.trivial
    assert res.conjugates == ((0, 1, ()), (0, 1, ()))


def test_witness_commutator_relator():
    X = ["x", "y"]
    Q = from_finite_presentation(X, [parse_word("x^-1 y^-1 x y", names=X)], 2)
    res = word_witness(Q, parse_word("x^-1 y^-1 x y", names=X))
    assert res.trivial and res.conjugates == ((0, 1, ()),)


def test_witness_nontrivial():
    Q = from_finite_presentation(["x"], [((0, 5),)], 1)
    res = word_witness(Q, ((0, 3),))
    assert not res.trivial and res.coords == (3,)


def test_witness_reproduces_word_in_free_group():
    X = ["x", "y"]
    rels = [parse_word(s, names=X) for s in ("x^5", "y^5")]
    Q = from_finite_presentation(X, rels, 2)
    F = Q.free.collector
    rng = random.Random(5)
    for _ in range(40):
        w = tuple((rng.randrange(2), 5 * rng.choice([-1, 1])) for _ in range(rng.randint(1, 4)))
        res = word_witness(Q, w)
        assert res.trivial  # products of fifth powers vanish in the class-2 quotient
        assert F.word_to_coords(conjugates_to_word(Q.relators, res.conjugates)) == F.word_to_coords(w)


def test_full_form_of_product_graph(heis, z):
    phi = Homomorphism.from_images(heis, z, [(1,), (1,), (0,)])
    ki = kernel_and_image(phi)
    for u, v in zip(ki.sections, ki.image.rows):
        assert apply(phi, u) == v
    W = reduce_to_full_form(ki.product.presentation, [ki.product.embed(h, g) for g, h in phi.pairs])
    assert W == ki.graph
    assert group_order(ki.product.presentation) is None
