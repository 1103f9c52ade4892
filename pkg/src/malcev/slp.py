"""Straight-line programs over signed generator letters."""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional, Sequence, Union

from .presentation import Coords, GroupWord, NilpotentPresentation, PresentationError, free_reduce

Letter = Optional[tuple[int, int]]  # (generator, +-1) or None for the empty word
Production = Union[tuple[str, Letter], tuple[str, int, int]]


@dataclass(frozen=True)
class Slp:
    """Productions indexed 0..n-1; children of ``('prod', b, c)`` satisfy b, c < index.

    The root is the last production.  ``names`` are only used for display.
    """

    productions: tuple[Production, ...]
    names: Optional[tuple[str, ...]] = None

    def __post_init__(self):
        if not self.productions:
            raise PresentationError("empty program has no root")
        for n, p in enumerate(self.productions):
            if p[0] == "prod":
                if not (0 <= p[1] < n and 0 <= p[2] < n):
                    raise PresentationError(f"production {n}: child not smaller")
            elif p[0] != "term":
                raise PresentationError(f"production {n}: unknown kind {p[0]!r}")

    @property
    def size(self) -> int:
        return len(self.productions)

    def __len__(self) -> int:
        return self.size

    @property
    def root(self) -> int:
        return len(self.productions) - 1

    def lengths(self) -> list[int]:
        out = []
        for p in self.productions:
            if p[0] == "term":
                out.append(0 if p[1] is None else 1)
            else:
                out.append(out[p[1]] + out[p[2]])
        return out

    def expand(self, limit: int = 10**7) -> GroupWord:
        """The derived word; refuses outputs longer than ``limit`` letters."""
        n = self.lengths()[-1]
        if n > limit:
            raise OverflowError(f"program derives a word of length {n}")
        words: list[GroupWord] = []
        for p in self.productions:
            if p[0] == "term":
                words.append(() if p[1] is None else (p[1],))
            else:
                words.append(words[p[1]] + words[p[2]])
        return words[-1]

    def depth(self) -> int:
        d: list[int] = []
        for p in self.productions:
            d.append(0 if p[0] == "term" else 1 + max(d[p[1]], d[p[2]]))
        return d[-1]


_LETTER = re.compile(r"^a(\d+)(?:\^(-1|1))?$")


def _parse_letter(tok: str, line: int) -> Letter:
    if tok == "eps":
        return None
    mt = _LETTER.match(tok)
    if not mt:
        raise PresentationError(f"bad letter {tok!r}", line)
    g = int(mt.group(1)) - 1
    if g < 0:
        raise PresentationError(f"bad letter {tok!r}", line)
    return (g, int(mt.group(2) or 1))


def parse_slp(text: str) -> Slp:
    """Parse ``term N a1``, ``prod N B C``, ``root N`` separated by newlines or ';'."""
    index: dict[str, int] = {}
    prods: list[Production] = []
    names: list[str] = []
    root: Optional[str] = None
    for ln, raw in enumerate(text.splitlines(), start=1):
        for stmt in raw.split("#", 1)[0].split(";"):
            toks = stmt.split()
            if not toks:
                continue
            kw = toks[0]
            if kw == "root":
                if len(toks) != 2:
                    raise PresentationError("usage: root <N>", ln)
                if root is not None:
                    raise PresentationError("duplicate root", ln)
                root = toks[1]
                continue
            if kw not in ("term", "prod"):
                raise PresentationError(f"unknown statement {kw!r}", ln)
            if len(toks) < 2:
                raise PresentationError(f"{kw} needs a nonterminal name", ln)
            name = toks[1]
            if name in index:
                raise PresentationError(f"multiple productions for {name}", ln)
            if kw == "term":
                if len(toks) != 3:
                    raise PresentationError("usage: term <N> <letter|eps>", ln)
                prods.append(("term", _parse_letter(toks[2], ln)))
            else:
                if len(toks) != 4:
                    raise PresentationError("usage: prod <N> <B> <C>", ln)
                kids = []
                for child in toks[2:]:
                    if child == name:
                        raise PresentationError(f"{name}: child not smaller", ln)
                    if child not in index:
                        raise PresentationError(f"{name}: forward reference to {child}", ln)
                    kids.append(index[child])
                prods.append(("prod", kids[0], kids[1]))
            index[name] = len(prods) - 1
            names.append(name)
    if root is None:
        raise PresentationError("missing root")
    if root not in index:
        raise PresentationError(f"root {root} has no production")
    # keep only what the root needs, preserving order
    keep = _reachable(prods, index[root])
    remap = {old: new for new, old in enumerate(keep)}
    out = []
    for old in keep:
        p = prods[old]
        out.append(p if p[0] == "term" else ("prod", remap[p[1]], remap[p[2]]))
    return Slp(tuple(out), tuple(names[i] for i in keep))


def _reachable(prods, root: int) -> list[int]:
    seen = {root}
    stack = [root]
    while stack:
        p = prods[stack.pop()]
        if p[0] == "prod":
            for ch in p[1:]:
                if ch not in seen:
                    seen.add(ch)
                    stack.append(ch)
    return sorted(seen)


def format_slp(A: Slp, letter: str = "a") -> str:
    names = A.names or tuple(f"B{i + 1}" for i in range(A.size))
    lines = []
    for n, p in enumerate(A.productions):
        if p[0] == "term":
            if p[1] is None:
                body = "eps"
            else:
                g, s = p[1]
                body = f"{letter}{g + 1}" if s == 1 else f"{letter}{g + 1}^-1"
            lines.append(f"term {names[n]} {body}")
        else:
            lines.append(f"prod {names[n]} {names[p[1]]} {names[p[2]]}")
    lines.append(f"root {names[-1]}")
    return "\n".join(lines) + "\n"


def slp_to_coords(P: NilpotentPresentation, A: Slp, values: Optional[Sequence[Coords]] = None) -> Coords:
    """Coordinates of the derived word, one multiplication per production.

    Letters are the Mal'cev generators of P, or ``values[k]`` for letter k when
    ``values`` is given.
    """
    col = P.collector
    m = P.m
    vals: list[Coords] = []
    for p in A.productions:
        if p[0] == "term":
            v = [0] * m
            if p[1] is not None:
                g, s = p[1]
                if g >= (m if values is None else len(values)):
                    raise PresentationError(f"letter a{g + 1} out of range")
                if values is None:
                    col.push(v, g, s)
                else:
                    v = values[g] if s > 0 else col.invert(values[g])
            vals.append(tuple(v))
        else:
            vals.append(col.multiply(vals[p[1]], vals[p[2]]))
    return vals[-1]


class ProgramBuilder:
    """Appends productions; terminals are shared, the root is moved last by ``finish``."""

    def __init__(self):
        self.prods: list[Production] = []
        self.terms: dict[Letter, int] = {}

    def term(self, letter: Letter) -> int:
        if letter not in self.terms:
            self.prods.append(("term", letter))
            self.terms[letter] = len(self.prods) - 1
        return self.terms[letter]

    def prod(self, b: int, c: int) -> int:
        self.prods.append(("prod", b, c))
        return len(self.prods) - 1

    def concat(self, parts: list[int]) -> int:
        """Balanced binary subdivision of a list of nonterminals."""
        while len(parts) > 1:
            nxt = [self.prod(parts[i], parts[i + 1]) for i in range(0, len(parts) - 1, 2)]
            if len(parts) % 2:
                nxt.append(parts[-1])
            parts = nxt
        return parts[0]

    def power(self, base: int, n: int) -> int:
        """base^n for n >= 1 by square-and-multiply from the top bit."""
        acc = base
        for bit in bin(n)[3:]:
            acc = self.prod(acc, acc)
            if bit == "1":
                acc = self.prod(acc, base)
        return acc

    def finish(self, root: int) -> Slp:
        # move the root to the end if a cached terminal ended up last
        if root != len(self.prods) - 1:
            self.prods.append(self.prods[root])
        return Slp(tuple(self.prods))


def _letters(w: GroupWord) -> list[tuple[int, int]]:
    out = []
    for g, e in w:
        s = 1 if e > 0 else -1
        out.extend([(g, s)] * abs(e))
    return out


def power_program(w: GroupWord, n: int) -> Slp:
    """Program for w^n of size <= |w| + ceil(log2 |w|) + 2 ceil(log2 n) + O(1)."""
    if n < 1:
        raise ValueError("n must be positive")
    letters = _letters(w)
    if not letters:
        raise ValueError("w must be nonempty")
    b = ProgramBuilder()
    base = b.concat([b.term(x) for x in letters])
    return b.finish(b.power(base, n))


def word_program(w: GroupWord) -> Slp:
    """Program for a word with syllables a_k^e, each syllable as a power program."""
    b = ProgramBuilder()
    parts = []
    for g, e in free_reduce(w):
        parts.append(b.power(b.term((g, 1 if e > 0 else -1)), abs(e)))
    if not parts:
        return Slp((("term", None),))
    return b.finish(b.concat(parts))


def coords_to_slp(P: NilpotentPresentation, g: Coords) -> Slp:
    """Program deriving the normal-form word a_1^{g_1} ... a_m^{g_m}."""
    return word_program(tuple((i, x) for i, x in enumerate(g) if x))


def random_slp(rng, m: int, size: int) -> Slp:
    """A random program with ``size`` productions over generators 0..m-1."""
    prods: list[Production] = []
    nterm = max(1, min(size, rng.randint(1, 3)))
    for _ in range(nterm):
        prods.append(("term", (rng.randrange(m), rng.choice((-1, 1)))))
    while len(prods) < size:
        n = len(prods)
        prods.append(("prod", rng.randrange(n), rng.randrange(n)))
    return Slp(tuple(prods))
