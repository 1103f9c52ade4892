"""Homomorphisms: kernels and images through full forms in a direct product."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence

from .presentation import Coords, GroupWord, NilpotentPresentation, PresentationError, free_reduce, invert_word
from .slp import slp_to_coords
from .subgroup import (
    FullForm,
    evaluate_word,
    express_as_program,
    membership,
    presentation_of_full_form,
    presentation_relators,
    reduce_to_full_form,
)


@dataclass(frozen=True)
class Homomorphism:
    """phi: K -> target defined by phi(g_i) = h_i on K = <g_1, ..., g_n> <= source.

    Well-definedness is the caller's responsibility.
    """

    source: NilpotentPresentation
    target: NilpotentPresentation
    pairs: tuple[tuple[Coords, Coords], ...]

    def __post_init__(self):
        pairs = []
        for g, h in self.pairs:
            g, h = tuple(g), tuple(h)
            if len(g) != self.source.m or len(h) != self.target.m:
                raise PresentationError("generator/image pair has the wrong length")
            pairs.append((self.source.collector.normalize_torsion(g), self.target.collector.normalize_torsion(h)))
        object.__setattr__(self, "pairs", tuple(pairs))

    @classmethod
    def from_images(cls, source, target, images: Sequence[Coords]) -> "Homomorphism":
        """The map sending the i-th Mal'cev generator of ``source`` to images[i]."""
        return cls(source, target, tuple((source.unit(i), tuple(h)) for i, h in enumerate(images)))


@dataclass(frozen=True)
class ProductGroup:
    """H x G with the Mal'cev basis of H first, then that of G.

    Weights: H keeps its weights, G's are multiplied by (c_H + 1), which keeps
    them above H's and preserves [D_i, D_j] <= D_{i+j}.
    """

    presentation: NilpotentPresentation
    first: NilpotentPresentation
    second: NilpotentPresentation

    @property
    def split_at(self) -> int:
        return self.first.m

    def embed(self, h: Sequence[int], g: Sequence[int]) -> Coords:
        return tuple(h) + tuple(g)

    def split(self, x: Sequence[int]) -> tuple[Coords, Coords]:
        k = self.split_at
        return tuple(x[:k]), tuple(x[k:])


@lru_cache(maxsize=256)
def direct_product(H: NilpotentPresentation, G: NilpotentPresentation) -> ProductGroup:
    k = H.m
    scale = H.nilpotency_class + 1

    def shift(t: Coords, left: bool) -> Coords:
        return tuple(t) + (0,) * G.m if left else (0,) * k + tuple(t)

    power = {i: shift(t, True) for i, t in H.power_tails.items()}
    power.update({i + k: shift(t, False) for i, t in G.power_tails.items()})
    conj = {key: shift(t, True) for key, t in H.conj_tails.items()}
    conj.update({(i + k, j + k): shift(t, False) for (i, j), t in G.conj_tails.items()})
    inv = {key: shift(t, True) for key, t in H.conj_inv_tails.items()}
    inv.update({(i + k, j + k): shift(t, False) for (i, j), t in G.conj_inv_tails.items()})
    P = NilpotentPresentation(
        weights=H.weights + tuple(w * scale for w in G.weights),
        exponents=H.exponents + G.exponents,
        power_tails=power,
        conj_tails=conj,
        conj_inv_tails=inv,
    )
    return ProductGroup(P, H, G)


@dataclass(frozen=True)
class KernelImage:
    kernel: FullForm  # in the source
    image: FullForm  # in the target
    graph: FullForm  # full form of {(h_i, g_i)} in target x source
    product: ProductGroup

    def __iter__(self):
        return iter((self.kernel, self.image))

    @property
    def sections(self) -> tuple[Coords, ...]:
        """Source parts u_1..u_r of the rows whose target part is v_1..v_r."""
        r = len(self.image.rows)
        return tuple(self.product.split(x)[1] for x in self.graph.rows[:r])


def kernel_and_image(phi: Homomorphism) -> KernelImage:
    prod = direct_product(phi.target, phi.source)
    W = reduce_to_full_form(prod.presentation, [prod.embed(h, g) for g, h in phi.pairs])
    k = prod.split_at
    r = sum(1 for p in W.pivots if p < k)
    image = FullForm(tuple(prod.split(x)[0] for x in W.rows[:r]), W.pivots[:r])
    kernel = FullForm(tuple(prod.split(x)[1] for x in W.rows[r:]), tuple(p - k for p in W.pivots[r:]))
    return KernelImage(kernel, image, W, prod)


class NotInImage(Exception):
    pass


def preimage(phi: Homomorphism, h: Sequence[int], ki: Optional[KernelImage] = None) -> Coords:
    """Some g in the domain with phi(g) = h."""
    if ki is None:
        ki = kernel_and_image(phi)
    h = phi.target.collector.normalize_torsion(tuple(h))
    beta = membership(phi.target, ki.image, h)
    if beta is None:
        raise NotInImage(str(h))
    col = ki.product.presentation.collector
    v = [0] * ki.product.presentation.m
    for row, b in zip(ki.graph.rows, beta):
        if b:
            col.multiply_into(v, col.power(row, b))
    img, g = ki.product.split(v)
    if img != h:
        raise AssertionError("preimage failed verification")
    return g


def apply(phi: Homomorphism, g: Sequence[int], tracked: Optional[FullForm] = None) -> Coords:
    """phi(g) for g in K: write g over the g_i as a program, then evaluate it on the h_i."""
    A = express_as_program(phi.source, [x for x, _ in phi.pairs], g, tracked)
    return slp_to_coords(phi.target, A, [y for _, y in phi.pairs])


def relation_failures(phi: Homomorphism) -> list[GroupWord]:
    """Relators of K's presentation that phi does not send to the identity.

    K = <g_i> gets a nilpotent presentation on its full form; phi extends to a
    homomorphism exactly when every relator holds on the images of that basis.
    """
    gens = [x for x, _ in phi.pairs]
    F = reduce_to_full_form(phi.source, gens, track=True)
    K = presentation_of_full_form(phi.source, F)
    images = [apply(phi, row, F) for row in F.rows]
    ident = phi.target.identity()
    return [rel for rel in presentation_relators(K).relators if evaluate_word(phi.target, rel, images) != ident]


# ---------------------------------------------------------------------------
# word problem witnesses in finitely presented nilpotent quotients


Conjugate = tuple[int, int, GroupWord]  # (relator index, sign, conjugator)


def _conjugate_product(spec) -> list[Conjugate]:
    """[r, y_1, ..., y_j] as a product of conjugates of r^{+-1}.

    Uses [u, y] = u^{-1} u^y: invert the list for u^{-1}, extend every
    conjugator by y for u^y.
    """
    out: list[Conjugate] = [(spec.relator, 1, ())]
    for y in spec.letters:
        inv = [(i, -s, c) for i, s, c in reversed(out)]
        conj = [(i, s, free_reduce(c + (y,))) for i, s, c in out]
        out = inv + conj
    return out


def _cancel(items: list[Conjugate]) -> list[Conjugate]:
    out: list[Conjugate] = []
    for it in items:
        if out and out[-1][0] == it[0] and out[-1][2] == it[2] and out[-1][1] == -it[1]:
            out.pop()
        else:
            out.append(it)
    return out


def conjugates_to_word(relators: Sequence[GroupWord], items: Sequence[Conjugate]) -> GroupWord:
    w: list = []
    for i, s, c in items:
        r = relators[i] if s > 0 else invert_word(relators[i])
        w.extend(invert_word(c))
        w.extend(r)
        w.extend(c)
    return free_reduce(w)


@dataclass(frozen=True)
class WordWitness:
    trivial: bool
    conjugates: tuple[Conjugate, ...] = ()
    coords: Optional[Coords] = None


def word_witness(quotient, w: GroupWord, limit: int = 10**6) -> WordWitness:
    """Decide w = 1 in the nilpotent quotient; if so, w as a product of relator conjugates.

    The output satisfies: collecting the product in the free nilpotent group
    gives exactly the coordinates of w there.
    """
    F = quotient.free
    fw = F.collector.word_to_coords(w)
    g = quotient.project(fw)
    if any(g):
        return WordWitness(False, (), g)
    T = quotient.kernel
    gam = membership(F, T.tracked_rows(), fw)
    if gam is None:
        raise AssertionError("trivial word outside the kernel")
    ex = T.expressions
    specs = quotient.generators
    memo: dict[int, list[Conjugate]] = {}

    def expand(node: int) -> list[Conjugate]:
        stack = [node]
        while stack:
            x = stack[-1]
            if x in memo:
                stack.pop()
                continue
            nd = ex.nodes[x]
            kind = nd[0]
            if kind == "gen":
                memo[x] = _conjugate_product(specs[nd[1]])
            elif kind == "one":
                memo[x] = []
            else:
                kids = [nd[1]] if kind == "pow" else [nd[1], nd[2]]
                todo = [k for k in kids if k not in memo]
                if todo:
                    stack.extend(todo)
                    continue
                if kind == "mul":
                    memo[x] = _cancel(memo[nd[1]] + memo[nd[2]])
                else:
                    base, e = memo[nd[1]], nd[2]
                    if e < 0:
                        base = [(i, -s, c) for i, s, c in reversed(base)]
                        e = -e
                    if len(base) * e > limit:
                        raise OverflowError("witness too long")
                    memo[x] = _cancel(base * e)
            stack.pop()
        return memo[node]

    items: list[Conjugate] = []
    for x, k in zip(T.exprs, gam):
        if k:
            items.extend(expand(ex.pow(x, k)))
    items = _cancel(items)
    # verification in the free nilpotent group
    got = F.collector.word_to_coords(conjugates_to_word(quotient.relators, items))
    if got != fw:
        raise AssertionError("word witness failed verification")
    return WordWitness(True, tuple(items), g)
