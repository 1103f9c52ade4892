"""Independent oracles: unitriangular integer matrices and brute-force finite groups."""
from __future__ import annotations

from itertools import product


def mat_mul(a, b):
    n = len(a)
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(i, j + 1)) for j in range(n)) for i in range(n)
    )


def mat_identity(n):
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


def mat_inv(a):
    # unitriangular: (I + N)^{-1} = I - N + N^2 - ...
    n = len(a)
    eye = mat_identity(n)
    nil = tuple(tuple(a[i][j] - eye[i][j] for j in range(n)) for i in range(n))
    out, term, sign = eye, eye, 1
    for _ in range(n):
        term = mat_mul(term, nil) if term is not eye else nil
        sign = -sign
        out = tuple(tuple(out[i][j] + sign * term[i][j] for j in range(n)) for i in range(n))
    return out


def mat_pow(a, e):
    if e < 0:
        a, e = mat_inv(a), -e
    out = mat_identity(len(a))
    while e:
        if e & 1:
            out = mat_mul(out, a)
        a = mat_mul(a, a)
        e >>= 1
    return out


def elementary(n, i, j):
    return tuple(tuple(int(r == c or (r, c) == (i, j)) for c in range(n)) for r in range(n))


def commutator(x, y):
    return mat_mul(mat_mul(mat_inv(x), mat_inv(y)), mat_mul(x, y))


class MatrixModel:
    """Mal'cev coordinates read off unitriangular matrices by peeling generators.

    ``gens[i]`` is the matrix of a_i and ``lead[i]`` the entry that is first
    disturbed by a_i inside its weight layer.
    """

    def __init__(self, gens, lead):
        self.gens = gens
        self.lead = lead
        self.n = len(gens[0])
        self._pos = [self._elementary_position(g) for g in range(len(gens))]

    def word(self, w):
        n = self.n
        out = [list(r) for r in mat_identity(n)]
        for g, e in w:
            pos = self._pos[g]
            if pos is None:
                out = [list(r) for r in mat_mul(out, mat_pow(self.gens[g], e))]
                continue
            i, j = pos
            # right multiplication by I + e E_ij adds e * column i to column j
            for r in range(n):
                out[r][j] += e * out[r][i]
        return tuple(tuple(r) for r in out)

    def _elementary_position(self, g):
        m = self.gens[g]
        off = [(i, j) for i in range(self.n) for j in range(i + 1, self.n) if m[i][j]]
        if len(off) == 1 and m[off[0][0]][off[0][1]] == 1:
            return off[0]
        return None

    def coords(self, mat):
        res = mat
        out = []
        for g, (i, j) in zip(self.gens, self.lead):
            step = g[i][j]
            a, r = divmod(res[i][j], step)
            assert r == 0
            out.append(a)
            res = mat_mul(mat_pow(g, -a), res)
        assert res == mat_identity(self.n), res
        return tuple(out)


def heis_model():
    x, y = elementary(3, 0, 1), elementary(3, 1, 2)
    z = commutator(y, x)
    return MatrixModel([x, y, z], [(0, 1), (1, 2), (0, 2)])


def ut4_model():
    a1, a2, a3 = elementary(4, 0, 1), elementary(4, 1, 2), elementary(4, 2, 3)
    a4 = commutator(a2, a1)
    a5 = commutator(a3, a2)
    a6 = commutator(a5, a1)
    return MatrixModel([a1, a2, a3, a4, a5, a6], [(0, 1), (1, 2), (2, 3), (0, 2), (1, 3), (0, 3)])


class FiniteGroup:
    """Brute-force model of a finite group given by a multiplication function."""

    def __init__(self, elements, mul):
        self.elements = list(elements)
        self.mul = mul
        self.identity = next(g for g in self.elements if all(mul(g, h) == h for h in self.elements))
        self._inv = {g: next(h for h in self.elements if mul(g, h) == self.identity) for g in self.elements}

    def inv(self, g):
        return self._inv[g]

    def generated(self, gens):
        seen = {self.identity}
        frontier = [self.identity]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = self.mul(x, g)
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return seen

    def conj(self, g, u):
        return self.mul(self.mul(self.inv(u), g), u)

    def centralizer(self, g):
        return [u for u in self.elements if self.mul(g, u) == self.mul(u, g)]


def heis_mod(p):
    """Heisenberg group over Z/p as triples (a, b, c) = a1^a a2^b a3^c."""

    def mul(g, h):
        a, b, c = g
        x, y, z = h
        # a2^b a1^x = a1^x a2^b a3^{bx}
        return ((a + x) % p, (b + y) % p, (c + z + b * x) % p)

    return FiniteGroup(product(range(p), repeat=3), mul)
