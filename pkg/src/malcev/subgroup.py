"""Full forms of subgroups, membership with witnesses, subgroup presentations."""
from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass, field
from math import gcd
from typing import Optional, Sequence

from .presentation import (
    Coords,
    GroupWord,
    NilpotentPresentation,
    PresentationError,
    format_coords,
    free_reduce,
    invert_word,
    word_length,
)
from .slp import ProgramBuilder, Slp, power_program, slp_to_coords


class NotMember(Exception):
    """The element is not in the subgroup."""


# ---------------------------------------------------------------------------
# Bezout coefficients


def ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    """(d, x, y) with d = gcd(a, b) >= 0 and x a + y b = d."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


@dataclass(frozen=True)
class GcdCombination:
    d: int
    x: tuple[int, ...]
    half_bound_ok: bool

    def __iter__(self):
        return iter((self.d, self.x))


def gcd_combination(a: Sequence[int]) -> GcdCombination:
    """d = gcd(a) and x with sum x_i a_i = d and |x_i| <= max |a_i|.

    Pairs are combined along a balanced binary tree.  Coefficients are then
    shrunk pairwise: adding k (a_j / g, -a_i / g) to (x_i, x_j) keeps the sum.
    """
    a = [int(v) for v in a]
    if not a:
        raise ValueError("empty input")
    if not any(a):
        raise ValueError("all entries are zero")
    n = len(a)
    # nodes: (gcd, {index: coefficient})
    level = [(abs(v), {i: (1 if v >= 0 else -1)} if v else {}) for i, v in enumerate(a)]
    while len(level) > 1:
        nxt = []
        for i in range(0, len(level) - 1, 2):
            (g1, c1), (g2, c2) = level[i], level[i + 1]
            if not g1:
                nxt.append((g2, c2))
                continue
            if not g2:
                nxt.append((g1, c1))
                continue
            d, x, y = ext_gcd(g1, g2)
            # keep |x| <= g2 / d and |y| <= g1 / d
            step = g2 // d
            k = x // step if step else 0
            x -= k * step
            y += k * (g1 // d)
            if abs(x - step) < abs(x):
                x -= step
                y += g1 // d
            coeffs = {j: c * x for j, c in c1.items()}
            for j, c in c2.items():
                coeffs[j] = coeffs.get(j, 0) + c * y
            nxt.append((d, coeffs))
        if len(level) % 2:
            nxt.append(level[-1])
        level = nxt
    d, coeffs = level[0]
    x = [coeffs.get(i, 0) for i in range(n)]
    bound = max(abs(v) for v in a)
    _shrink(a, x, d, bound)
    assert sum(xi * ai for xi, ai in zip(x, a)) == d
    assert all(abs(xi) <= bound for xi in x), (a, x)
    return GcdCombination(d, tuple(x), all(2 * abs(xi) <= bound for xi in x))


def _shrink(a: list[int], x: list[int], d: int, bound: int) -> None:
    n = len(a)
    for _ in range(4 * n + 8):
        changed = False
        worst = max(range(n), key=lambda i: abs(x[i]))
        if abs(x[worst]) <= bound // 2 or not a[worst]:
            return
        i = worst
        for j in range(n):
            if j == i or not a[j]:
                continue
            g = gcd(a[i], a[j])
            si, sj = a[j] // g, -a[i] // g
            # x_i + k si minimal in absolute value
            k = -round(x[i] / si)
            for kk in (k - 1, k, k + 1):
                ni, nj = x[i] + kk * si, x[j] + kk * sj
                if max(abs(ni), abs(nj)) < max(abs(x[i]), abs(x[j])):
                    x[i], x[j] = ni, nj
                    changed = True
                    break
            if changed:
                break
        if not changed:
            return


# ---------------------------------------------------------------------------
# expression tracking


class Expressions:
    """A DAG of group expressions over input generators h_0, ..., h_{n-1}."""

    def __init__(self, n: int):
        self.n = n
        self.nodes: list[tuple] = [("gen", i) for i in range(n)]
        self.lengths: list[int] = [1] * n  # letter count of the expanded word, before free reduction
        self._one = self._add(("one",))
        self._words: dict[int, GroupWord] = {}

    def _add(self, node: tuple) -> int:
        kind = node[0]
        if kind == "one":
            size = 0
        elif kind == "mul":
            size = self.lengths[node[1]] + self.lengths[node[2]]
        else:
            size = abs(node[2]) * self.lengths[node[1]]
        self.nodes.append(node)
        self.lengths.append(size)
        return len(self.nodes) - 1

    def one(self) -> int:
        return self._one

    def gen(self, i: int) -> int:
        return i

    def inv(self, a: int) -> int:
        node = self.nodes[a]
        if node[0] == "one":
            return a
        if node[0] == "pow":
            return self.pow(node[1], -node[2])
        return self._add(("pow", a, -1))

    def mul(self, a: int, b: int) -> int:
        if self.nodes[a][0] == "one":
            return b
        if self.nodes[b][0] == "one":
            return a
        return self._add(("mul", a, b))

    def pow(self, a: int, n: int) -> int:
        if n == 0 or self.nodes[a][0] == "one":
            return self._one
        if n == 1:
            return a
        node = self.nodes[a]
        if node[0] == "pow":
            return self._add(("pow", node[1], node[2] * n))
        return self._add(("pow", a, n))

    def conj(self, a: int, u: int) -> int:
        """u^{-1} a u."""
        return self.mul(self.mul(self.inv(u), a), u)

    def word(self, a: int, limit: int = 10**7) -> GroupWord:
        """Freely reduced run-length word; powers of one generator stay one syllable."""
        memo = self._words
        stack = [a]
        while stack:
            x = stack[-1]
            if x in memo:
                stack.pop()
                continue
            node = self.nodes[x]
            kind = node[0]
            if kind == "gen":
                memo[x] = ((node[1], 1),)
            elif kind == "one":
                memo[x] = ()
            else:
                kids = [node[1]] if kind == "pow" else [node[1], node[2]]
                todo = [k for k in kids if k not in memo]
                if todo:
                    stack.extend(todo)
                    continue
                if kind == "mul":
                    w = free_reduce(memo[node[1]] + memo[node[2]])
                else:
                    base, e = memo[node[1]], node[2]
                    if e < 0:
                        base, e = invert_word(base), -e
                    if len(base) == 1:
                        w = ((base[0][0], base[0][1] * e),)
                    else:
                        if word_length(base) * e > limit:
                            raise OverflowError("expression too long to expand")
                        w = free_reduce(base * e)
                if word_length(w) > limit:
                    raise OverflowError("expression too long to expand")
                memo[x] = w
            stack.pop()
        return memo[a]

    def program(self, a: int) -> Slp:
        """Straight-line program over signed input letters deriving ``word(a)``."""
        b = ProgramBuilder()
        memo: dict[tuple[int, int], int] = {}
        stack = [(a, 1)]
        while stack:
            key = stack[-1]
            if key in memo:
                stack.pop()
                continue
            x, sign = key
            node = self.nodes[x]
            kind = node[0]
            if kind == "gen":
                memo[key] = b.term((node[1], sign))
            elif kind == "one":
                memo[key] = b.term(None)
            else:
                if kind == "mul":
                    kids = [(node[1], sign), (node[2], sign)]
                    if sign < 0:
                        kids.reverse()
                else:
                    kids = [(node[1], sign if node[2] > 0 else -sign)]
                todo = [k for k in kids if k not in memo]
                if todo:
                    stack.extend(todo)
                    continue
                if kind == "mul":
                    memo[key] = b.prod(memo[kids[0]], memo[kids[1]])
                else:
                    memo[key] = b.power(memo[kids[0]], abs(node[2]))
            stack.pop()
        return b.finish(memo[(a, 1)])

    def evaluate(self, P: NilpotentPresentation, a: int, values: Sequence[Coords]) -> Coords:
        col = P.collector
        memo: dict[int, Coords] = {}
        stack = [a]
        while stack:
            x = stack[-1]
            if x in memo:
                stack.pop()
                continue
            node = self.nodes[x]
            kind = node[0]
            if kind == "gen":
                memo[x] = tuple(values[node[1]])
            elif kind == "one":
                memo[x] = P.identity()
            else:
                kids = [node[1]] if kind == "pow" else [node[1], node[2]]
                todo = [k for k in kids if k not in memo]
                if todo:
                    stack.extend(todo)
                    continue
                if kind == "mul":
                    memo[x] = col.multiply(memo[node[1]], memo[node[2]])
                else:
                    memo[x] = tuple(col.power(memo[node[1]], node[2]))
            stack.pop()
        return memo[a]


def evaluate_word(P: NilpotentPresentation, w: GroupWord, values: Sequence[Coords]) -> Coords:
    """Coordinates of a word over elements given by their coordinates."""
    col = P.collector
    v = [0] * P.m
    for i, e in w:
        col.multiply_into(v, col.power(values[i], e))
    return tuple(v)


# ---------------------------------------------------------------------------
# full forms


@dataclass(frozen=True)
class FullForm:
    """Canonical rows and pivots of a full form.

    Tracked full forms also keep ``echelon``: rows with the same pivots and the
    same suffix spans, each with an expression over the input generators.  They
    differ from ``rows`` only by the above-pivot reduction, which is left out
    because it inflates the expressions without changing any span.
    """

    rows: tuple[Coords, ...]
    pivots: tuple[int, ...]
    exprs: Optional[tuple[int, ...]] = field(default=None, compare=False)
    expressions: Optional[Expressions] = field(default=None, compare=False, repr=False)
    echelon: Optional[tuple[Coords, ...]] = field(default=None, compare=False, repr=False)

    @property
    def size(self) -> int:
        return len(self.rows)

    def __len__(self) -> int:
        return len(self.rows)

    def serialize(self) -> str:
        return "".join(f"pivot {p + 1}: {format_coords(r)}\n" for p, r in zip(self.pivots, self.rows))

    def suffix(self, start: int) -> "FullForm":
        """Rows with index >= start (the subgroup H meet <a_{pivot(start)}, ...>)."""
        return FullForm(self.rows[start:], self.pivots[start:])

    @property
    def tracked(self) -> bool:
        return self.exprs is not None

    def tracked_rows(self) -> "FullForm":
        """The echelon rows whose expressions are known, as a membership basis."""
        if self.exprs is None:
            raise ValueError("full form was computed without tracking")
        return FullForm(self.echelon, self.pivots)

    def expression(self, i: int) -> GroupWord:
        """Word over the inputs evaluating to ``echelon[i]``."""
        if self.exprs is None:
            raise ValueError("full form was computed without tracking")
        return self.expressions.word(self.exprs[i])


def _first_nonzero(v: Sequence[int]) -> int:
    for i, x in enumerate(v):
        if x:
            return i
    return -1


class _Queue:
    """FIFO of pending (coords, expr) items; shortest expression first when tracking.

    Rows installed from short expressions keep the tracked words small, and
    longer candidates then mostly sift to the identity.
    """

    def __init__(self, track: Optional[Expressions]):
        self.track = track
        self.fifo: deque = deque()
        self.heap: list = []
        self.seq = 0

    def append(self, item) -> None:
        if self.track is None:
            self.fifo.append(item)
            return
        self.seq += 1
        heapq.heappush(self.heap, (self.track.lengths[item[1]], self.seq, item))

    def popleft(self):
        if self.track is None:
            return self.fifo.popleft()
        return heapq.heappop(self.heap)[2]

    def __bool__(self) -> bool:
        return bool(self.fifo or self.heap)


class _Reducer:
    """Working state of one full-form computation (private per call)."""

    def __init__(self, P: NilpotentPresentation, track: Optional[Expressions]):
        self.P = P
        self.col = P.collector
        self.exps = P.exponents
        self.rows: dict[int, tuple[Coords, Optional[int]]] = {}
        self.track = track
        self.queue = _Queue(track)

    # helpers on (coords, expr) pairs
    def _pow(self, item, n):
        g, x = item
        return tuple(self.col.power(g, n)), (self.track.pow(x, n) if self.track else None)

    def _mul(self, a, b):
        return self.col.multiply(a[0], b[0]), (self.track.mul(a[1], b[1]) if self.track else None)

    def _conj(self, a, u, sign):
        # u^{-sign} a u^{sign}
        if sign > 0:
            inv = (self.col.invert(u[0]), self.track.inv(u[1]) if self.track else None)
            return self._mul(self._mul(inv, a), u)
        inv = (self.col.invert(u[0]), self.track.inv(u[1]) if self.track else None)
        return self._mul(self._mul(u, a), inv)

    def add(self, g: Coords, expr: Optional[int]) -> None:
        self.queue.append((tuple(g), expr))
        self.drain()

    def drain(self) -> None:
        while self.queue:
            self._sift(self.queue.popleft())

    def _sift(self, item) -> None:
        rows, exps = self.rows, self.exps
        while True:
            g = item[0]
            p = _first_nonzero(g)
            if p < 0:
                return
            if p not in rows:
                if exps[p] is None and g[p] < 0:
                    item = self._pow(item, -1)
                self._install(p, item)
                return
            row = rows[p]
            a, b = row[0][p], g[p]
            if b % a == 0:
                item = self._mul(self._pow(row, -(b // a)), item)
                continue
            d, x, y = ext_gcd(a, b)
            new = self._mul(self._pow(row, x), self._pow(item, y))
            self.queue.append(row)
            self.queue.append(item)
            self._install(p, new)
            return

    def _install(self, p: int, item) -> None:
        e = self.exps[p]
        if e is not None:
            a = item[0][p]
            d, x, _ = ext_gcd(a, e)
            if d != a:
                self.queue.append(item)
                item = self._pow(item, x)
                assert item[0][p] == d
            # the power with pivot exponent e lies further down
            self.queue.append(self._pow(item, e // d))
        self.rows[p] = item
        for q, other in list(self.rows.items()):
            if q == p:
                continue
            if q < p:
                self.queue.append(self._conj(item, other, 1))
                self.queue.append(self._conj(item, other, -1))
            else:
                self.queue.append(self._conj(other, item, 1))
                self.queue.append(self._conj(other, item, -1))

    def reduced_rows(self) -> list[Coords]:
        """Rows with entries above each pivot floor-reduced (coordinates only)."""
        col = self.col
        order = sorted(self.rows)
        rows = [self.rows[p][0] for p in order]
        for i, p in enumerate(order):
            a = rows[i][p]
            for k in range(i):
                q = rows[k][p] // a
                if q:
                    rows[k] = col.multiply(rows[k], tuple(col.power(rows[i], -q)))
        return rows

    def certify(self) -> list:
        """Closure failures: conjugates and powers not in the suffix span."""
        order = sorted(self.rows)
        rows = [self.rows[p][0] for p in order]
        ff = FullForm(tuple(rows), tuple(order))
        bad = []
        for i, p in enumerate(order):
            item = self.rows[p]
            suffix = ff.suffix(i + 1)
            e = self.exps[p]
            if e is not None:
                pw = self._pow(item, e // item[0][p])
                if membership(self.P, suffix, pw[0]) is None:
                    bad.append(pw)
            for j in range(i + 1, len(order)):
                other = self.rows[order[j]]
                for s in (1, -1):
                    c = self._conj(other, item, s)
                    if membership(self.P, suffix, c[0]) is None:
                        bad.append(c)
        return bad

    def result(self) -> FullForm:
        order = tuple(sorted(self.rows))
        rows = tuple(self.reduced_rows())
        if not self.track:
            return FullForm(rows, order)
        exprs = tuple(self.rows[p][1] for p in order)
        echelon = tuple(self.rows[p][0] for p in order)
        return FullForm(rows, order, exprs, self.track, echelon)


def reduce_to_full_form(
    P: NilpotentPresentation, gens: Sequence[Coords], track: bool = False
) -> FullForm:
    """The unique full form of the subgroup generated by ``gens``."""
    col = P.collector
    gens = [tuple(g) for g in gens]
    for g in gens:
        if len(g) != P.m:
            raise PresentationError(f"element {format_coords(g)} has the wrong length")
    gens = [col.normalize_torsion(g) if not col.is_normalized(g) else g for g in gens]
    expr = Expressions(len(gens)) if track else None
    red = _Reducer(P, expr)
    for i, g in enumerate(gens):
        red.add(g, expr.gen(i) if expr else None)
    while True:
        bad = red.certify()
        if not bad:
            break
        for item in bad:
            red.queue.append(item)
        red.drain()
    return red.result()


def check_full_form(P: NilpotentPresentation, F: FullForm) -> None:
    """Assert conditions (i)-(v) and the closure conditions of a full form."""
    exps = P.exponents
    assert len(F.rows) <= P.m
    for i, (r, p) in enumerate(zip(F.rows, F.pivots)):
        assert any(r), "zero row"
        assert _first_nonzero(r) == p, "pivot mismatch"
        assert r[p] > 0, "pivot entry not positive"
        if i:
            assert F.pivots[i - 1] < p, "pivots not increasing"
        if exps[p] is not None:
            assert exps[p] % r[p] == 0, "pivot entry does not divide relative order"
        for k in range(i):
            assert 0 <= F.rows[k][p] < r[p], "entry above pivot not reduced"
    col = P.collector
    for i, (r, p) in enumerate(zip(F.rows, F.pivots)):
        suffix = F.suffix(i + 1)
        if exps[p] is not None:
            assert membership(P, suffix, tuple(col.power(r, exps[p] // r[p]))) is not None
        for j in range(i + 1, len(F.rows)):
            for c in (col.conjugate(F.rows[j], r), col.conjugate(F.rows[j], col.invert(r))):
                assert membership(P, suffix, c) is not None, "not closed under conjugation"


# ---------------------------------------------------------------------------
# membership


def membership(P: NilpotentPresentation, F: FullForm, h: Sequence[int]) -> Optional[tuple[int, ...]]:
    """Exponents gamma with h = g_1^{gamma_1} ... g_s^{gamma_s}, or None."""
    col = P.collector
    v = list(h)
    if len(v) != P.m:
        raise PresentationError("element has the wrong length")
    gammas = []
    start = 0
    for row, p in zip(F.rows, F.pivots):
        for i in range(start, p):
            if v[i]:
                return None
        a, b = row[p], v[p]
        if b % a:
            return None
        k = b // a
        gammas.append(k)
        if k:
            # v <- g^{-k} v
            w = col.power(row, -k)
            col.multiply_into(w, v)
            v = w
        start = p + 1
    if any(v[start:]):
        return None
    return tuple(gammas)


def _express(P, gens, h, full_form):
    F = full_form if full_form is not None and full_form.tracked else reduce_to_full_form(P, gens, track=True)
    gam = membership(P, F.tracked_rows(), h)
    if gam is None:
        raise NotMember(format_coords(h))
    ex = F.expressions
    node = ex.one()
    for x, k in zip(F.exprs, gam):
        node = ex.mul(node, ex.pow(x, k))
    return ex, node


def express_in_input_generators(
    P: NilpotentPresentation,
    gens: Sequence[Coords],
    h: Sequence[int],
    full_form: Optional[FullForm] = None,
    limit: int = 10**7,
) -> GroupWord:
    """A word over the inputs (generator i means gens[i]) evaluating to h.

    The words can be long (polynomial in the input size, of high degree);
    OverflowError is raised beyond ``limit`` letters, and
    :func:`express_as_program` gives the same expression compressed.
    """
    ex, node = _express(P, gens, h, full_form)
    w = ex.word(node, limit)
    got = evaluate_word(P, w, [tuple(g) for g in gens])
    if got != P.collector.normalize_torsion(tuple(h)):
        raise AssertionError("expression failed verification")
    return w


def express_as_program(
    P: NilpotentPresentation, gens: Sequence[Coords], h: Sequence[int], full_form: Optional[FullForm] = None
) -> Slp:
    """Like :func:`express_in_input_generators`, as a straight-line program over the inputs."""
    ex, node = _express(P, gens, h, full_form)
    A = ex.program(node)
    if slp_to_coords(P, A, [tuple(g) for g in gens]) != P.collector.normalize_torsion(tuple(h)):
        raise AssertionError("expression failed verification")
    return A


# ---------------------------------------------------------------------------
# subgroup presentations


def subgroup_presentation(
    P: NilpotentPresentation, gens: Sequence[Coords], check: bool = True
) -> tuple[NilpotentPresentation, FullForm]:
    F = reduce_to_full_form(P, gens)
    return presentation_of_full_form(P, F, check=check), F


def presentation_of_full_form(P: NilpotentPresentation, F: FullForm, check: bool = True) -> NilpotentPresentation:
    col = P.collector
    s = len(F.rows)
    rows, piv = F.rows, F.pivots
    exps = []
    for r, p in zip(rows, piv):
        e = P.exponents[p]
        exps.append(None if e is None else e // r[p])
    weights = tuple(P.weights[p] for p in piv)

    def tail(i: int, x: Coords) -> Coords:
        gam = membership(P, F.suffix(i + 1), x)
        if gam is None:
            raise AssertionError("relation tail outside the suffix subgroup")
        return (0,) * (i + 1) + gam

    power_tails = {}
    for i in range(s):
        if exps[i] is not None:
            power_tails[i] = tail(i, tuple(col.power(rows[i], exps[i])))
    conj_tails, inv_tails = {}, {}
    for j in range(s):
        for i in range(j):
            conj_tails[(i, j)] = tail(j, col.commutator(rows[j], rows[i]))
            # beta = g_j g_i^{-1} g_j^{-1} g_i
            b = col.multiply(col.multiply(rows[j], col.invert(rows[i])), col.multiply(col.invert(rows[j]), rows[i]))
            inv_tails[(i, j)] = tail(j, b)
    H = NilpotentPresentation(
        weights=weights,
        exponents=tuple(exps),
        power_tails=power_tails,
        conj_tails=conj_tails,
        conj_inv_tails=inv_tails,
    )
    if check:
        from .consistency import check_consistency

        rep = check_consistency(H)
        if not rep.consistent:
            raise AssertionError(f"subgroup presentation inconsistent at {rep.overlap}")
    return H


def group_order(P: NilpotentPresentation) -> Optional[int]:
    """Order of the group, or None when infinite."""
    n = 1
    for e in P.exponents:
        if e is None:
            return None
        n *= e
    return n


# ---------------------------------------------------------------------------
# presentations with compressed relators


@dataclass(frozen=True)
class FinitePresentation:
    """Generators 0..n-1 and relators as run-length words."""

    ngens: int
    relators: tuple[GroupWord, ...]
    names: Optional[tuple[str, ...]] = None

    def name(self, i: int) -> str:
        return self.names[i] if self.names else f"a{i + 1}"

    def format(self) -> str:
        from .presentation import format_word

        names = self.names or tuple(f"a{i + 1}" for i in range(self.ngens))
        lines = [f"gens {self.ngens}"]
        if self.names:
            lines += [f"name {i + 1} {n}" for i, n in enumerate(self.names)]
        lines += [f"rel {format_word(r, names)}" for r in self.relators]
        return "\n".join(lines) + "\n"


def presentation_relators(P: NilpotentPresentation) -> FinitePresentation:
    """The defining relators of a nilpotent presentation, exponents in binary."""
    rels = []

    def tail_word(t: Coords) -> GroupWord:
        return tuple((k, x) for k, x in enumerate(t) if x)

    for i, e in enumerate(P.exponents):
        if e is not None:
            rels.append(free_reduce(((i, e),) + invert_word(tail_word(P.power_tail(i)))))
    for j in range(P.m):
        for i in range(j):
            # a_j a_i = a_i a_j t
            rhs = ((i, 1), (j, 1)) + tail_word(P.conj_tail(i, j))
            rels.append(free_reduce(((j, 1), (i, 1)) + invert_word(rhs)))
            rhs = ((i, 1), (j, -1)) + tail_word(P.conj_inv_tails.get((i, j), P.identity()))
            rels.append(free_reduce(((j, -1), (i, 1)) + invert_word(rhs)))
    return FinitePresentation(P.m, tuple(r for r in rels if r), P.names)


def compress_presentation(F: FinitePresentation) -> FinitePresentation:
    """Replace every syllable a^b with |b| >= 2 by a power program.

    Each program nonterminal with a pair production N -> B C becomes a fresh
    generator with the relator N^{-1} B C; terminal productions are replaced by
    their letter and the program root replaces the syllable.
    """
    n = F.ngens
    names = list(F.names) if F.names else [f"a{i + 1}" for i in range(F.ngens)]
    extra: list[GroupWord] = []
    out = []
    for rel in F.relators:
        new = []
        for g, e in rel:
            if abs(e) < 2:
                new.append((g, e))
                continue
            prog = power_program(((g, 1 if e > 0 else -1),), abs(e))
            sym: list[tuple[int, int]] = []
            for p in prog.productions:
                if p[0] == "term":
                    sym.append(p[1])
                else:
                    sym.append((n, 1))
                    names.append(f"c{n - F.ngens + 1}")
                    b, c = sym[p[1]], sym[p[2]]
                    extra.append(free_reduce(((n, -1), b, c)))
                    n += 1
            new.append(sym[-1])
        out.append(free_reduce(new))
    return FinitePresentation(n, tuple(extra) + tuple(out), tuple(names))


def expand_compressed(C: FinitePresentation, ngens: int) -> FinitePresentation:
    """Eliminate generators >= ngens, greatest first, using their defining relators."""
    defs: dict[int, GroupWord] = {}
    rest = []
    for rel in C.relators:
        if rel and rel[0][0] >= ngens and rel[0][1] == -1 and rel[0][0] not in defs:
            defs[rel[0][0]] = rel[1:]
        else:
            rest.append(rel)

    def subst(w: GroupWord) -> GroupWord:
        out: list = []
        for g, e in w:
            if g in defs:
                body = subst(defs[g])
                if e < 0:
                    body, e = invert_word(body), -e
                out.extend(body * e)
            else:
                out.append((g, e))
        return free_reduce(out)

    for g in sorted(defs, reverse=True):
        defs[g] = subst(defs[g])
    return FinitePresentation(ngens, tuple(subst(r) for r in rest), C.names[:ngens] if C.names else None)
