"""Free nilpotent groups on a Hall basis.

Tails are obtained from the Magnus embedding x_i -> 1 + X_i into the free
associative ring truncated above degree c, which is faithful on F / gamma_{c+1}.
An element is sifted weight by weight: the lowest-degree part of what remains is
an integer combination of the Lie polynomials of the basic commutators of that
weight.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

from .presentation import Coords, NilpotentPresentation, PresentationError


@dataclass(frozen=True)
class BasicCommutator:
    """Either a free generator (``left is None``) or the bracket [left, right].

    ``left`` and ``right`` are indices into the basis list.
    """

    index: int
    weight: int
    left: Optional[int] = None
    right: Optional[int] = None
    generator: Optional[int] = None

    def label(self, basis: Sequence["BasicCommutator"], names: Optional[Sequence[str]] = None) -> str:
        if self.left is None:
            return names[self.generator] if names else f"x{self.generator + 1}"
        return f"[{basis[self.left].label(basis, names)}, {basis[self.right].label(basis, names)}]"


def hall_basis(c: int, r: int) -> list[BasicCommutator]:
    """Basic commutators of weight <= c on r generators, ordered by weight.

    [u, v] is basic when u > v and, if u = [u1, u2], also u2 <= v.
    """
    basis = [BasicCommutator(i, 1, generator=i) for i in range(r)]
    by_weight = {1: list(range(r))}
    for w in range(2, c + 1):
        layer = []
        for wu in range(w - 1, 0, -1):
            wv = w - wu
            if wv > wu:
                continue
            for u in by_weight[wu]:
                for v in by_weight[wv]:
                    if not u > v:
                        continue
                    bu = basis[u]
                    if bu.right is not None and bu.right > v:
                        continue
                    layer.append((u, v))
        layer.sort()
        by_weight[w] = []
        for u, v in layer:
            idx = len(basis)
            basis.append(BasicCommutator(idx, w, u, v))
            by_weight[w].append(idx)
    return basis


def witt_count(c: int, r: int) -> int:
    """Number of basic commutators of weight <= c (necklace polynomial)."""
    def mobius(n):
        res, p, k = 1, 2, n
        while p * p <= k:
            if k % p == 0:
                k //= p
                if k % p == 0:
                    return 0
                res = -res
            p += 1
        return -res if k > 1 else res

    total = 0
    for n in range(1, c + 1):
        total += sum(mobius(d) * r ** (n // d) for d in range(1, n + 1) if n % d == 0) // n
    return total


# ---------------------------------------------------------------------------
# truncated free associative ring; elements are dicts word -> coefficient


class TruncatedAlgebra:
    def __init__(self, r: int, c: int):
        self.r = r
        self.c = c

    def mul(self, a: dict, b: dict) -> dict:
        out: dict = {}
        c = self.c
        for u, x in a.items():
            lu = len(u)
            for v, y in b.items():
                if lu + len(v) > c:
                    continue
                k = u + v
                out[k] = out.get(k, 0) + x * y
        return {k: v for k, v in out.items() if v}

    def generator(self, i: int, sign: int = 1) -> dict:
        # image of x_i^{sign}
        if sign > 0:
            return {(): 1, (i,): 1}
        return {(i,) * k: (-1) ** k for k in range(self.c + 1)}

    def power(self, a: dict, n: int) -> dict:
        # a = 1 + y with y nilpotent: (1 + y)^n = sum C(n, k) y^k
        y = {k: v for k, v in a.items() if k}
        out = {(): 1}
        term = {(): 1}
        coef = 1
        for k in range(1, self.c + 1):
            term = self.mul(term, y)
            if not term:
                break
            coef = coef * (n - k + 1) // k
            if not coef:
                break
            for key, v in term.items():
                out[key] = out.get(key, 0) + coef * v
        return {k: v for k, v in out.items() if v}

    def inverse(self, a: dict) -> dict:
        return self.power(a, -1)


class MagnusSifter:
    """Coordinates of Magnus images with respect to a Hall basis."""

    def __init__(self, basis: list[BasicCommutator], r: int, c: int):
        self.A = A = TruncatedAlgebra(r, c)
        self.basis = basis
        self.images: list[dict] = []
        for b in basis:
            if b.left is None:
                self.images.append(A.generator(b.generator))
            else:
                u, v = self.images[b.left], self.images[b.right]
                self.images.append(A.mul(A.mul(A.inverse(u), A.inverse(v)), A.mul(u, v)))
        self.layers: dict[int, list[int]] = {}
        for b in basis:
            self.layers.setdefault(b.weight, []).append(b.index)
        self.solvers = {w: self._solver(w, idx) for w, idx in self.layers.items()}

    def _solver(self, w: int, idxs: list[int]):
        # pick monomial rows making the coefficient matrix invertible; store inverse
        cols = [{k: v for k, v in self.images[i].items() if len(k) == w} for i in idxs]
        monos = sorted({k for col in cols for k in col})
        n = len(idxs)
        rows_all = [[Fraction(col.get(mono, 0)) for col in cols] for mono in monos]
        chosen: list[int] = []
        basis_rows: list[list[Fraction]] = []
        pivots: list[int] = []
        for ri, row in enumerate(rows_all):
            vec = list(row)
            for prow, p in zip(basis_rows, pivots):
                if vec[p]:
                    f = vec[p] / prow[p]
                    vec = [a - f * b for a, b in zip(vec, prow)]
            nz = next((i for i, x in enumerate(vec) if x), None)
            if nz is not None:
                chosen.append(ri)
                basis_rows.append(vec)
                pivots.append(nz)
                if len(chosen) == n:
                    break
        if len(chosen) != n:
            raise ArithmeticError("Lie polynomials of one weight are dependent")
        square = [rows_all[ri] for ri in chosen]
        inv = _invert_matrix(square)
        return [monos[ri] for ri in chosen], inv

    def coords(self, g: dict) -> Coords:
        A = self.A
        out = [0] * len(self.basis)
        h = g
        for w in sorted(self.layers):
            idxs = self.layers[w]
            monos, inv = self.solvers[w]
            rhs = [h.get(mono, 0) for mono in monos]
            prefix = {(): 1}
            for row, i in zip(inv, idxs):
                val = sum(a * b for a, b in zip(row, rhs))
                if val.denominator != 1:
                    raise ArithmeticError("non-integral Hall coordinate")
                a = int(val)
                out[i] = a
                if a:
                    prefix = A.mul(prefix, A.power(self.images[i], a))
            h = A.mul(A.inverse(prefix), h)
        if any(k for k in h if k):
            raise ArithmeticError("element not exhausted by sifting")
        return tuple(out)


def _invert_matrix(mat: list[list[Fraction]]) -> list[list[Fraction]]:
    n = len(mat)
    aug = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(mat)]
    for col in range(n):
        piv = next(r for r in range(col, n) if aug[r][col])
        aug[col], aug[piv] = aug[piv], aug[col]
        p = aug[col][col]
        aug[col] = [x / p for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


@dataclass(frozen=True)
class FreeNilpotent:
    presentation: NilpotentPresentation
    basis: tuple[BasicCommutator, ...]

    def __iter__(self):
        return iter((self.presentation, list(self.basis)))


def free_nilpotent(c: int, r: int, max_generators: int = 2000) -> FreeNilpotent:
    """Consistent presentation of the free nilpotent group of class c and rank r."""
    if c < 1:
        raise PresentationError("class must be at least 1")
    if r < 1:
        raise PresentationError("rank must be at least 1")
    if witt_count(c, r) > max_generators:
        raise MemoryError(f"free nilpotent group of class {c}, rank {r} needs {witt_count(c, r)} generators")
    basis = hall_basis(c, r)
    m = len(basis)
    weights = tuple(b.weight for b in basis)
    tails = {}
    sifter = None
    pos = {(b.left, b.right): b.index for b in basis if b.left is not None}
    for j in range(m):
        for i in range(j):
            if weights[i] + weights[j] > c:
                continue
            k = pos.get((j, i))
            if k is not None:
                # [b_j, b_i] is itself basic
                tails[(i, j)] = tuple(int(x == k) for x in range(m))
                continue
            if sifter is None:
                sifter = MagnusSifter(basis, r, c)
            A = sifter.A
            bj, bi = sifter.images[j], sifter.images[i]
            comm = A.mul(A.mul(A.inverse(bj), A.inverse(bi)), A.mul(bj, bi))
            tails[(i, j)] = sifter.coords(comm)
    pres = NilpotentPresentation(
        weights=weights,
        exponents=(None,) * m,
        conj_tails=tails,
    )
    return FreeNilpotent(pres, tuple(basis))


# ---------------------------------------------------------------------------
# nilpotent quotients of finitely presented groups


@dataclass(frozen=True)
class CommutatorGenerator:
    """The iterated commutator [r_i^{+1}, y_1, ..., y_j] with y's signed free generators."""

    relator: int
    letters: tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class NilpotentQuotient:
    """Result of :func:`from_finite_presentation`.

    ``presentation`` presents F / N where F is the free nilpotent group and N the
    normal closure of the relators; ``iso[i]`` is the image of the i-th free
    generator.  The remaining fields keep what word witnesses need.
    """

    presentation: NilpotentPresentation
    iso: tuple[Coords, ...]
    free: NilpotentPresentation
    basis: tuple[BasicCommutator, ...]
    relators: tuple
    relator_coords: tuple[Coords, ...]
    generators: tuple[CommutatorGenerator, ...]
    kernel: "object"  # FullForm of N in F, tracked over ``generators``
    kept: tuple[int, ...]
    names: Optional[tuple[str, ...]] = None

    def __iter__(self):
        return iter((self.presentation, self.iso))

    def reduce(self, f: Sequence[int]) -> list[int]:
        """Canonical representative of the coset f N (pivot entries reduced)."""
        col = self.free.collector
        v = list(f)
        for row, p in zip(self.kernel.rows, self.kernel.pivots):
            q = v[p] // row[p]
            if q:
                col.multiply_into(v, col.power(row, -q))
        return v

    def project(self, f: Sequence[int]) -> Coords:
        v = self.reduce(f)
        return tuple(v[i] for i in self.kept)

    def word_coords(self, w) -> Coords:
        """Coordinates in the quotient of a word over the free generators."""
        return self.project(self.free.collector.word_to_coords(w))


def from_finite_presentation(
    X: Union[int, Sequence[str]], R: Sequence, c: int
) -> NilpotentQuotient:
    """Consistent presentation of the class-c quotient of <X | R>.

    ``X`` is a generator count or a list of names; relators are run-length
    words over generator indices 0..r-1.
    """
    from .presentation import free_reduce
    from .subgroup import membership, reduce_to_full_form

    names = None if isinstance(X, int) else tuple(X)
    r = X if isinstance(X, int) else len(X)
    F, basis = free_nilpotent(c, r)
    col = F.collector
    weights = F.weights
    rels = tuple(free_reduce(w) for w in R)
    rel_coords = tuple(col.word_to_coords(w) for w in rels)

    def weight_of(v):
        for i, x in enumerate(v):
            if x:
                return weights[i]
        return None

    gens: list[Coords] = []
    specs: list[CommutatorGenerator] = []
    letters = [(x, s) for x in range(r) for s in (1, -1)]
    for i, rc in enumerate(rel_coords):
        frontier = [(rc, ())]
        while frontier:
            nxt = []
            for v, ys in frontier:
                w = weight_of(v)
                if w is None:
                    continue
                gens.append(v)
                specs.append(CommutatorGenerator(i, ys))
                if w + 1 > c:
                    continue
                for y in letters:
                    yv = F.unit(y[0], y[1])
                    nxt.append((col.commutator(v, yv), ys + (y,)))
            frontier = nxt
    T = reduce_to_full_form(F, gens, track=True)
    # the subgroup generated by the iterated commutators is normal
    for row in T.rows:
        for x in range(r):
            for s in (1, -1):
                u = F.unit(x, s)
                if membership(F, T, col.conjugate(row, u)) is None:
                    raise AssertionError("iterated commutators do not generate a normal subgroup")
    pivot_entry = {p: row[p] for row, p in zip(T.rows, T.pivots)}
    kept = tuple(i for i in range(F.m) if pivot_entry.get(i, 0) != 1)
    index = {old: new for new, old in enumerate(kept)}
    res = NilpotentQuotient(
        presentation=None,  # filled below
        iso=(),
        free=F,
        basis=tuple(basis),
        relators=rels,
        relator_coords=rel_coords,
        generators=tuple(specs),
        kernel=T,
        kept=kept,
        names=names,
    )

    def proj(v) -> Coords:
        red = res.reduce(v)
        return tuple(red[i] for i in kept)

    n = len(kept)
    exps, power_tails, conj_tails = [], {}, {}
    for new, old in enumerate(kept):
        d = pivot_entry.get(old)
        exps.append(d)
        if d is not None:
            power_tails[new] = proj(F.unit(old, d))
    for j in range(n):
        for i in range(j):
            t = F.conj_tails.get((kept[i], kept[j]))
            if t is not None:
                conj_tails[(i, j)] = proj(t)
    G = NilpotentPresentation(
        weights=tuple(weights[i] for i in kept),
        exponents=tuple(exps),
        power_tails=power_tails,
        conj_tails=conj_tails,
        names=None,
    )
    iso = tuple(proj(F.unit(x)) for x in range(r))
    object.__setattr__(res, "presentation", G)
    object.__setattr__(res, "iso", iso)
    return res
