"""Overlap tests deciding whether a nilpotent presentation is consistent."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .collection import Collector
from .presentation import Coords, GroupWord, NilpotentPresentation, normal_word


@dataclass(frozen=True)
class ConsistencyReport:
    consistent: bool
    overlap: Optional[str] = None
    left: Optional[Coords] = None
    right: Optional[Coords] = None
    witness: Optional[Coords] = None

    def __bool__(self) -> bool:
        return self.consistent

    @property
    def witness_word(self) -> Optional[GroupWord]:
        return None if self.witness is None else normal_word(self.witness)


def check_consistency(P: NilpotentPresentation) -> ConsistencyReport:
    """Run the associativity overlaps with a collector that trusts nothing.

    The collector used here applies the relations literally (no linear or
    polynomial shortcuts), so any disagreement between two ways of collecting
    an overlap is a genuine failure of consistency.
    """
    m = P.m
    col = Collector(P, accelerate=False)

    def letter(i, e=1):
        return [i, e]

    def rel(i, j):
        # a_j a_i rewritten by its relation: a_i a_j t
        raw = list(P.conj_tail(i, j))
        raw[i] += 1
        raw[j] += 1
        return raw

    def rel_word(raw):
        return [letter(k, x) for k, x in enumerate(raw) if x]

    def report(name, left, right):
        witness = col.multiply(col.invert(left), right)
        return ConsistencyReport(False, name, tuple(left), tuple(right), witness)

    def collect(parts):
        v = [0] * m
        for k, x in parts:
            col.push(v, k, x)
        return v

    exps = P.exponents
    for k in range(m):
        for j in range(k):
            for i in range(j):
                # (a_k a_j) a_i  vs  a_k (a_j a_i)
                left = collect(rel_word(rel(j, k)) + [letter(i)])
                right = collect([letter(k)] + rel_word(rel(i, j)))
                if left != right:
                    return report(f"a{k + 1} a{j + 1} a{i + 1}", left, right)
    for j in range(m):
        ej = exps[j]
        if ej is None:
            continue
        pt = rel_word(P.power_tail(j))
        for i in range(j):
            # a_j^{e_j} a_i  vs  a_j^{e_j - 1} (a_j a_i)
            left = collect(pt + [letter(i)])
            right = collect([letter(j, ej - 1)] + rel_word(rel(i, j)))
            if left != right:
                return report(f"a{j + 1}^{ej} a{i + 1}", left, right)
        for k in range(j + 1, m):
            # a_k a_j^{e_j}  vs  (a_k a_j) a_j^{e_j - 1}
            left = collect([letter(k)] + pt)
            right = collect(rel_word(rel(j, k)) + [letter(j, ej - 1)])
            if left != right:
                return report(f"a{k + 1} a{j + 1}^{ej}", left, right)
        # a_j a_j^{e_j}  vs  a_j^{e_j} a_j
        left = collect([letter(j)] + pt)
        right = collect(pt + [letter(j)])
        if left != right:
            return report(f"a{j + 1}^{ej + 1}", left, right)
    for i in range(m):
        for j in range(i + 1, m):
            # (a_j a_i^{-1}) a_i  vs  a_j
            left = collect([letter(j), letter(i, -1), letter(i)])
            right = collect([letter(j)])
            if left != right:
                return report(f"a{j + 1} a{i + 1}^-1 a{i + 1}", left, right)
            # stored inverse tail: a_j^{-1} a_i  vs  a_i a_j^{-1} beta
            beta = P.conj_inv_tails.get((i, j))
            left = collect([letter(j, -1), letter(i)])
            right = collect([letter(i), letter(j, -1)] + rel_word(beta or (0,) * m))
            if left != right:
                return report(f"a{j + 1}^-1 a{i + 1}", left, right)
    return ConsistencyReport(True)
