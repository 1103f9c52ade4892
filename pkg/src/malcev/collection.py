"""Collection from the left on Mal'cev coordinate vectors.

The basic step is ``push(v, k, e)``, which replaces the normal form ``v`` by the
normal form of ``v * a_k^e``.  Writing ``v = prefix * a_k^{v_k} * S`` with ``S``
in the suffix subgroup ``N_k = <a_{k+1}, ..., a_m>`` we have

    v * a_k^e = prefix * a_k^{v_k + e} * phi_k^e(S),   phi_k(x) = a_k^{-1} x a_k,

after which the k-th exponent is reduced modulo e_k and the power tail is
multiplied into the suffix from the left.  Everything else (products, inverses,
powers, words) is a sequence of pushes.

How ``phi_k^e`` is applied depends on the suffix, and is decided once per k:

* ``trivial``: a_k commutes with the whole suffix.
* ``linear``: the suffix is abelian, so phi_k lifts to the unipotent integer
  matrix ``M = I + N`` on the exponent vectors and ``M^e = sum C(e, i) N^i``.
* ``poly``: the suffix is torsion-free, so each coordinate of ``phi_k^e(S)`` is
  a polynomial in ``e`` and the exponents of ``S`` of bounded weighted degree.
  The polynomial is interpolated from values produced by the general method and
  cross-checked at random points before use.
* ``general``: images of the generators under ``phi_k^{+-2^i}`` are tabulated
  and ``phi_k^e(S) = prod phi_k^e(a_j)^{s_j}`` is collected in the suffix.
"""
from __future__ import annotations

import random
from itertools import product as _cartesian
from typing import TYPE_CHECKING, Iterable, Optional, Sequence

if TYPE_CHECKING:
    from .presentation import Coords, GroupWord, NilpotentPresentation

TRIVIAL, LINEAR, POLY, GENERAL = "trivial", "linear", "poly", "general"


def binomial(x: int, a: int) -> int:
    """Generalized binomial coefficient C(x, a) for any integer x, a >= 0."""
    r = 1
    for i in range(a):
        r = r * (x - i) // (i + 1)
    return r


class Collector:
    """Group operations on normalized coordinate tuples of one presentation."""

    def __init__(self, presentation: "NilpotentPresentation", accelerate: bool = True, seed: int = 0):
        self.P = presentation
        self.m = m = presentation.m
        self.accelerate = accelerate
        self._exp = list(presentation.exponents)
        self._rng = random.Random(seed)
        # phi_k(a_j) - unit_j as sparse rows, and full images, per k
        self._img: list[list[Optional[tuple]]] = [[None] * m for _ in range(m)]
        self._img_inv: list[Optional[list]] = [None] * m
        self._tables: list[dict] = [dict() for _ in range(m)]
        self._ptail: list[Optional[list]] = [None] * m
        self._pt_sparse: list[list] = [[] for _ in range(m)]
        self._mode: list[str] = [TRIVIAL] * m
        self._lin: list[list] = [[] for _ in range(m)]
        self._lin_deg1: list[bool] = [True] * m
        self._poly: list[list] = [[] for _ in range(m)]
        self._poly_deg: list[list] = [[] for _ in range(m)]
        # suffix properties: abelian[k] / torsion_free[k] describe <a_{k+1},...>
        self._suffix_abelian = [True] * (m + 1)
        self._suffix_torsion = [False] * (m + 1)
        nonabelian_from = -1
        for (i, j) in presentation.conj_tails:
            nonabelian_from = max(nonabelian_from, i)
        for k in range(m - 1, -1, -1):
            self._suffix_abelian[k] = k >= nonabelian_from
            self._suffix_torsion[k] = self._suffix_torsion[k + 1] or (
                k + 1 < m and self._exp[k + 1] is not None
            )
        for k in range(m - 1, -1, -1):
            self._build(k)

    # ------------------------------------------------------------------
    # construction

    def _normalize_raw_suffix(self, raw: Sequence[int], start: int) -> list[int]:
        """Normal form of a_start^{raw_start} ... a_m^{raw_m} (entries before start ignored)."""
        v = [0] * self.m
        for j in range(start, self.m):
            if raw[j]:
                self.push(v, j, raw[j])
        return v

    def _build(self, k: int) -> None:
        P, m = self.P, self.m
        if self._exp[k] is not None:
            t = self._normalize_raw_suffix(P.power_tail(k), k + 1)
            if any(t):
                self._ptail[k] = t
                self._pt_sparse[k] = [(l, x) for l, x in enumerate(t) if x]
        moved = False
        for j in range(k + 1, m):
            tail = P.conj_tails.get((k, j))
            if tail is None:
                continue
            raw = list(tail)
            raw[j] = 1
            img = self._normalize_raw_suffix(raw, j)
            diff = [(l, img[l] - (1 if l == j else 0)) for l in range(j, m)]
            diff = [(l, d) for l, d in diff if d]
            if diff:
                self._img[k][j] = tuple(img)
                moved = True
        if not moved:
            self._mode[k] = TRIVIAL
            return
        if self.accelerate and self._suffix_abelian[k]:
            rows = []
            for j in range(k + 1, m):
                img = self._img[k][j]
                if img is not None:
                    rows.append((j, [(l, img[l] - (l == j)) for l in range(j, m) if img[l] - (l == j)]))
            rows.sort(key=lambda r: -r[0])
            self._lin[k] = rows
            # N^2 = 0 iff N applied to every row image vanishes
            deg1 = True
            for j, row in rows:
                y = self._apply_N(rows, dict(row))
                if y:
                    deg1 = False
                    break
            self._lin_deg1[k] = deg1
            self._mode[k] = LINEAR
            return
        self._mode[k] = GENERAL
        if self.accelerate and not self._suffix_torsion[k]:
            if self._build_poly(k):
                self._mode[k] = POLY

    @staticmethod
    def _apply_N(rows, x: dict) -> dict:
        y: dict = {}
        for j, row in rows:
            xj = x.get(j)
            if xj:
                for l, d in row:
                    y[l] = y.get(l, 0) + xj * d
        return {l: c for l, c in y.items() if c}

    # -- polynomial mode -------------------------------------------------

    def _downsets(self, k: int):
        """Per target l: exponent patterns (a_e, ((j, a_j), ...)) of admissible monomials."""
        w = self.P.weights
        m = self.m
        out = {}
        for l in range(k + 1, m):
            budget = w[l]
            pats = []
            vars_ = [j for j in range(k + 1, l) if w[j] <= budget - w[k]]

            def rec(idx, left, acc):
                if idx == len(vars_):
                    pats.append(tuple(acc))
                    return
                j = vars_[idx]
                a = 0
                while a * w[j] <= left:
                    if a:
                        acc.append((j, a))
                    rec(idx + 1, left - a * w[j], acc)
                    if a:
                        acc.pop()
                    a += 1

            ae = 1
            while ae * w[k] <= budget:
                start = len(pats)
                rec(0, budget - ae * w[k], [])
                for i in range(start, len(pats)):
                    pats[i] = (ae, pats[i])
                ae += 1
            out[l] = pats
        return out

    def _general_conj(self, k: int, e: int, s: Sequence[int]) -> list[int]:
        v = [0] * self.m
        for j in range(k + 1, self.m):
            v[j] = s[j]
        self._apply_general(v, k, e)
        return v

    def _build_poly(self, k: int) -> bool:
        m = self.m
        pats = self._downsets(k)
        cache: dict = {}

        def f(ae: int, svars: tuple) -> list[int]:
            key = (ae, svars)
            if key not in cache:
                s = [0] * m
                for j, a in svars:
                    s[j] = a
                cache[key] = self._general_conj(k, ae, s)
            return cache[key]

        polys = []
        for l in range(k + 1, m):
            terms = []
            for ae, sv in pats[l]:
                # finite difference Delta^alpha f(0) over the box below alpha
                ranges = [range(ae + 1)] + [range(a + 1) for _, a in sv]
                c = 0
                for beta in _cartesian(*ranges):
                    be = beta[0]
                    if be == 0:
                        continue
                    bsv = tuple((j, b) for (j, _), b in zip(sv, beta[1:]) if b)
                    sign = -1 if (ae - be + sum(a - b for (_, a), b in zip(sv, beta[1:]))) % 2 else 1
                    coef = binomial(ae, be)
                    for (_, a), b in zip(sv, beta[1:]):
                        coef *= binomial(a, b)
                    s_l = 0
                    for j, b in bsv:
                        if j == l:
                            s_l = b
                    c += sign * coef * (f(be, bsv)[l] - s_l)
                if c:
                    terms.append((c, ae, sv))
            polys.append((l, terms))
        self._poly[k] = [(l, t) for l, t in polys if t]
        maxdeg = [0] * (m + 1)
        for _, terms in self._poly[k]:
            for _, ae, sv in terms:
                maxdeg[m] = max(maxdeg[m], ae)
                for j, a in sv:
                    maxdeg[j] = max(maxdeg[j], a)
        self._poly_deg[k] = maxdeg
        # cross-check against the general method at random points
        rng = self._rng
        for trial in range(6):
            e = rng.choice([-1, 1]) * rng.randint(1, 9 if trial < 4 else 1000)
            s = [0] * m
            for j in range(k + 1, m):
                s[j] = rng.randint(-9, 9) if trial < 4 else rng.randint(-10**6, 10**6)
            want = self._general_conj(k, e, s)
            got = list(s)
            self._poly_eval(k, e, got)
            if got != want:
                self._poly[k] = []
                return False
        return True

    def _poly_eval(self, k: int, e: int, v: list[int]) -> None:
        """In place: v[k+1:] <- phi_k^e(v[k+1:]) using the interpolated polynomials."""
        deg = self._poly_deg[k]
        m = self.m
        be = [1]
        for i in range(deg[m]):
            be.append(be[-1] * (e - i) // (i + 1))
        bs: dict[int, list[int]] = {}
        for j in range(k + 1, m):
            d = deg[j]
            if d:
                x = v[j]
                row = [1]
                for i in range(d):
                    row.append(row[-1] * (x - i) // (i + 1))
                bs[j] = row
        delta = []
        for l, terms in self._poly[k]:
            acc = 0
            for c, ae, sv in terms:
                t = c * be[ae]
                for j, a in sv:
                    t *= bs[j][a]
                    if not t:
                        break
                acc += t
            if acc:
                delta.append((l, acc))
        for l, acc in delta:
            v[l] += acc

    # -- general mode ----------------------------------------------------

    def _images(self, k: int, sign: int, level: int) -> list:
        """Images of a_j (j > k) under phi_k^{sign * 2^level}; None means fixed."""
        key = (sign, level)
        tab = self._tables[k]
        if key in tab:
            return tab[key]
        m = self.m
        if level == 0:
            if sign > 0:
                imgs = list(self._img[k])
            else:
                imgs = self._inverse_images(k)
        else:
            prev = self._images(k, sign, level - 1)
            imgs = [None] * m
            for j in range(k + 1, m):
                src = prev[j]
                if src is None:
                    continue
                out = self._apply_table(prev, k, src)
                imgs[j] = tuple(out)
        tab[key] = imgs
        return imgs

    def _inverse_images(self, k: int) -> list:
        # phi^{-1}(a_j) = a_j * phi^{-1}(t_j^{-1}) where phi(a_j) = a_j t_j
        m = self.m
        inv: list = [None] * m
        fwd = self._img[k]
        for j in range(m - 1, k, -1):
            img = fwd[j]
            if img is None:
                continue
            t = list(img)
            t[j] = 0
            tinv = self.invert(t)
            pre = self._apply_table(inv, k, tinv)
            out = [0] * m
            out[j] = 1
            self.multiply_into(out, pre)
            inv[j] = tuple(out)
        return inv

    def _apply_table(self, imgs, k: int, s: Sequence[int]) -> list[int]:
        out = [0] * self.m
        for j in range(k + 1, self.m):
            x = s[j]
            if not x:
                continue
            img = imgs[j]
            if img is None:
                self.push(out, j, x)
            else:
                self.multiply_into(out, self.power(img, x))
        return out

    def _apply_general(self, v: list[int], k: int, e: int) -> None:
        if not e:
            return
        sign = 1 if e > 0 else -1
        n = abs(e)
        s = list(v)
        level = 0
        while n:
            if n & 1:
                s = self._apply_table(self._images(k, sign, level), k, s)
            n >>= 1
            level += 1
        for j in range(k + 1, self.m):
            v[j] = s[j]

    # ------------------------------------------------------------------
    # the collection step

    def push(self, v: list[int], k: int, e: int) -> None:
        """In place: v <- normal form of v * a_k^e."""
        if not e:
            return
        mode = self._mode[k]
        if mode is not TRIVIAL:
            if mode is LINEAR:
                if self._lin_deg1[k]:
                    for j, row in self._lin[k]:
                        x = v[j]
                        if x:
                            x *= e
                            for l, d in row:
                                v[l] += x * d
                else:
                    self._linear_power(v, k, e)
                if self._suffix_torsion[k]:
                    self._normalize_abelian(v, k + 1)
            elif mode is POLY:
                self._poly_eval(k, e, v)
            else:
                self._apply_general(v, k, e)
        ek = self._exp[k]
        if ek is None:
            v[k] += e
            return
        q, r = divmod(v[k] + e, ek)
        v[k] = r
        if q and self._ptail[k] is not None:
            if self._suffix_abelian[k]:
                for l, x in self._pt_sparse[k]:
                    v[l] += q * x
                if self._suffix_torsion[k]:
                    self._normalize_abelian(v, k + 1)
            else:
                t = self.power(self._ptail[k], q)
                self.multiply_into(t, [0] * (k + 1) + v[k + 1:])
                v[k + 1:] = t[k + 1:]

    def _linear_power(self, v: list[int], k: int, e: int) -> None:
        rows = self._lin[k]
        x = {j: v[j] for j in range(k + 1, self.m) if v[j]}
        i = 0
        while x:
            i += 1
            x = self._apply_N(rows, x)
            if not x:
                break
            c = binomial(e, i)
            for l, y in x.items():
                v[l] += c * y

    def _normalize_abelian(self, v: list[int], start: int) -> None:
        exp = self._exp
        for j in range(start, self.m):
            ej = exp[j]
            if ej is not None and not 0 <= v[j] < ej:
                q, v[j] = divmod(v[j], ej)
                for l, x in self._pt_sparse[j]:
                    v[l] += q * x

    # ------------------------------------------------------------------
    # group operations

    def multiply_into(self, v: list[int], h: Sequence[int]) -> None:
        for j, x in enumerate(h):
            if x:
                self.push(v, j, x)

    def multiply(self, g: Sequence[int], h: Sequence[int]) -> "Coords":
        v = list(g)
        self.multiply_into(v, h)
        return tuple(v)

    def invert(self, g: Sequence[int]) -> "Coords":
        v = [0] * self.m
        for j in range(self.m - 1, -1, -1):
            if g[j]:
                self.push(v, j, -g[j])
        return tuple(v)

    def power(self, g: Sequence[int], n: int) -> list[int]:
        support = [j for j, x in enumerate(g) if x]
        if not n or not support:
            return [0] * self.m
        if len(support) == 1:
            v = [0] * self.m
            j = support[0]
            self.push(v, j, g[j] * n)
            return v
        if n < 0:
            g = self.invert(g)
            n = -n
        result = [0] * self.m
        base = list(g)
        while True:
            if n & 1:
                self.multiply_into(result, base)
            n >>= 1
            if not n:
                return result
            sq = list(base)
            self.multiply_into(sq, base)
            base = sq

    def word_to_coords(self, w: Iterable[tuple[int, int]]) -> "Coords":
        v = [0] * self.m
        push = self.push
        prev, acc = -1, 0
        for g, e in w:
            if g == prev:
                acc += e
                continue
            if acc:
                push(v, prev, acc)
            prev, acc = g, e
        if acc:
            push(v, prev, acc)
        return tuple(v)

    def normalize_torsion(self, raw: Sequence[int]) -> "Coords":
        """Normal form of a_1^{raw_1} ... a_m^{raw_m}, reducing left to right."""
        return tuple(self._normalize_raw_suffix(raw, 0))

    def conjugate(self, g: Sequence[int], u: Sequence[int]) -> "Coords":
        """u^{-1} g u."""
        v = list(self.invert(u))
        self.multiply_into(v, g)
        self.multiply_into(v, u)
        return tuple(v)

    def commutator(self, g: Sequence[int], h: Sequence[int]) -> "Coords":
        """[g, h] = g^{-1} h^{-1} g h."""
        v = list(self.invert(self.multiply(h, g)))
        self.multiply_into(v, g)
        self.multiply_into(v, h)
        return tuple(v)

    def is_normalized(self, g: Sequence[int]) -> bool:
        return len(g) == self.m and all(e is None or 0 <= x < e for x, e in zip(g, self._exp))

    @property
    def modes(self) -> tuple[str, ...]:
        return tuple(self._mode)


# module-level conveniences mirroring the operation names


def word_to_coords(P: "NilpotentPresentation", w: "GroupWord") -> "Coords":
    return P.collector.word_to_coords(w)


def multiply(P: "NilpotentPresentation", g: "Coords", h: "Coords") -> "Coords":
    return P.collector.multiply(g, h)


def invert(P: "NilpotentPresentation", g: "Coords") -> "Coords":
    return P.collector.invert(g)


def power(P: "NilpotentPresentation", g: "Coords", n: int) -> "Coords":
    return tuple(P.collector.power(g, n))


def normalize_torsion(P: "NilpotentPresentation", raw: Sequence[int]) -> "Coords":
    return P.collector.normalize_torsion(raw)
