"""Centralizers and conjugacy by induction on the nilpotency class.

Each level ``P_t`` is the quotient of ``P`` by its generators of weight > t,
and ``P_{t-1}`` is ``P_t`` modulo its top block Z of central generators.  Given
an element h of ``P_t`` and its centralizer modulo Z, the lifts of that
centralizer together with Z form a subgroup J, on which u -> [h, u] is a
homomorphism into Z.  Its kernel is the centralizer of h, and its image
decides whether a near-conjugate g (equal to h modulo Z) is conjugate to h.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence

from .consistency import check_consistency
from .morphism import Homomorphism, kernel_and_image, preimage
from .presentation import Coords, NilpotentPresentation
from .subgroup import FullForm, membership


@dataclass(frozen=True)
class QuotientView:
    """P modulo its top block of generators (those of maximal weight)."""

    presentation: NilpotentPresentation
    quotient: NilpotentPresentation
    top: NilpotentPresentation  # the central block as an abelian presentation
    stop: int  # index of the first generator of the top block

    def project(self, g: Sequence[int]) -> Coords:
        return tuple(g[: self.stop])

    def lift(self, g: Sequence[int]) -> Coords:
        return tuple(g) + (0,) * (self.presentation.m - self.stop)

    def top_part(self, g: Sequence[int]) -> Coords:
        return tuple(g[self.stop:])


@lru_cache(maxsize=128)
def quotient_view(P: NilpotentPresentation) -> QuotientView:
    c = P.nilpotency_class
    stop = next(i for i, w in enumerate(P.weights) if w == c)
    top = P.sub_presentation(stop, weights=(1,) * (P.m - stop))
    if any(top.conj_tails):
        raise AssertionError("top block of generators is not abelian")
    quotient = P.truncate(stop)
    report = check_consistency(quotient)
    if not report:
        raise AssertionError(f"quotient presentation inconsistent at {report.overlap}")
    return QuotientView(P, quotient, top, stop)


def _levels(P: NilpotentPresentation) -> list[QuotientView]:
    """Quotient views from P down to an abelian quotient (explicit, no recursion)."""
    out = []
    cur = P
    while cur.m and cur.nilpotency_class > 1 and any(cur.conj_tails):
        view = quotient_view(cur)
        out.append(view)
        cur = view.quotient
    return out


def _whole(P: NilpotentPresentation) -> FullForm:
    return FullForm(tuple(P.unit(i) for i in range(P.m)), tuple(range(P.m)))


def _step(view: QuotientView, h: Coords, below: FullForm):
    """Centralizer data of h in view.presentation, given C(h mod Z) in the quotient."""
    P = view.presentation
    col = P.collector
    J = [view.lift(k) for k in below.rows] + [P.unit(i) for i in range(view.stop, P.m)]
    pairs = tuple((u, view.top_part(col.commutator(h, u))) for u in J)
    phi = Homomorphism(P, view.top, pairs)
    return phi, kernel_and_image(phi)


def centralizer(P: NilpotentPresentation, g: Sequence[int]) -> FullForm:
    """Full form of the centralizer of g."""
    g = P.collector.normalize_torsion(tuple(g))
    levels = _levels(P)
    elems = [g]
    for view in levels:
        elems.append(view.project(elems[-1]))
    base = levels[-1].quotient if levels else P
    C = _whole(base)
    for view, h in zip(reversed(levels), reversed(elems[:-1])):
        _, ki = _step(view, h, C)
        C = ki.kernel
    col = P.collector
    for x in C.rows:
        if col.commutator(g, x) != P.identity():
            raise AssertionError("centralizer row does not commute with g")
    return C


@dataclass(frozen=True)
class ConjugacyResult:
    conjugate: bool
    u: Optional[Coords] = None

    def __bool__(self) -> bool:
        return self.conjugate


def conjugacy(P: NilpotentPresentation, g: Sequence[int], h: Sequence[int]) -> ConjugacyResult:
    """Decide whether u^{-1} g u = h for some u, and find such u."""
    col = P.collector
    g = col.normalize_torsion(tuple(g))
    h = col.normalize_torsion(tuple(h))
    levels = _levels(P)
    gs, hs = [g], [h]
    for view in levels:
        gs.append(view.project(gs[-1]))
        hs.append(view.project(hs[-1]))
    # abelian bottom: conjugate iff equal
    if gs[-1] != hs[-1]:
        return ConjugacyResult(False)
    base = levels[-1].quotient if levels else P
    C = _whole(base)
    u = base.identity()
    for view, gt, ht in zip(reversed(levels), reversed(gs[:-1]), reversed(hs[:-1])):
        Pt = view.presentation
        ct = Pt.collector
        v = view.lift(u)
        gv = ct.conjugate(gt, v)  # equals ht modulo the top block
        z = ct.multiply(ct.invert(gv), ht)
        phi, ki = _step(view, ht, C)
        # [gv, w] = [ht, w] on J since gv and ht differ by a central element
        target = view.top_part(z)
        if membership(view.top, ki.image, target) is None:
            return ConjugacyResult(False)
        w = preimage(phi, target, ki)
        u = ct.multiply(v, w)
        if ct.conjugate(gt, u) != ht:
            raise AssertionError("conjugator failed verification at an intermediate level")
        C = ki.kernel
    if col.conjugate(g, u) != h:
        raise AssertionError("conjugator failed verification")
    return ConjugacyResult(True, u)
