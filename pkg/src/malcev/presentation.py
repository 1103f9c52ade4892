"""Nilpotent presentations, group words and their text formats.

Generators are 0-based internally and 1-based in every text format
(``a1`` is generator 0).
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Optional, Sequence

Coords = tuple[int, ...]
Letter = tuple[int, int]
GroupWord = tuple[Letter, ...]


class PresentationError(ValueError):
    """Malformed presentation, word or coordinate input."""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)
        self.line = line
        self.column = column


@dataclass(frozen=True)
class NilpotentPresentation:
    """A nilpotent presentation on generators a_1, ..., a_m.

    Relations, with every tail stored as a full length-m exponent vector:

    * ``a_i^{e_i} = power_tails[i]`` for torsion indices i,
    * ``a_j a_i = a_i a_j conj_tails[i, j]`` for i < j,
    * ``a_j^{-1} a_i = a_i a_j^{-1} conj_inv_tails[i, j]`` for i < j.

    Zero tails are omitted from the dicts.  When ``conj_inv_tails`` is left as
    None it is derived from the other relations by collection.
    """

    weights: tuple[int, ...]
    exponents: tuple[Optional[int], ...]
    power_tails: dict[int, Coords] = field(default_factory=dict)
    conj_tails: dict[tuple[int, int], Coords] = field(default_factory=dict)
    conj_inv_tails: Optional[dict[tuple[int, int], Coords]] = None
    names: Optional[tuple[str, ...]] = field(default=None, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "weights", tuple(int(w) for w in self.weights))
        object.__setattr__(self, "exponents", tuple(None if e is None else int(e) for e in self.exponents))
        object.__setattr__(self, "power_tails", _clean_tails(self.power_tails, self.m))
        object.__setattr__(self, "conj_tails", _clean_tails(self.conj_tails, self.m))
        if self.names is not None:
            object.__setattr__(self, "names", tuple(self.names))
        self._validate()
        if self.conj_inv_tails is None:
            object.__setattr__(self, "conj_inv_tails", self._derive_inverse_tails())
        else:
            inv = _clean_tails(self.conj_inv_tails, self.m)
            for (i, j), tail in inv.items():
                self._check_tail(tail, j, f"conjinv {j + 1} {i + 1}")
            object.__setattr__(self, "conj_inv_tails", inv)

    def __hash__(self) -> int:
        return hash(self.key)

    @cached_property
    def key(self) -> tuple:
        """Hashable value identifying the presentation (names excluded)."""
        return (
            self.weights,
            self.exponents,
            tuple(sorted(self.power_tails.items())),
            tuple(sorted(self.conj_tails.items())),
            tuple(sorted(self.conj_inv_tails.items())),
        )

    # -- basic accessors ---------------------------------------------------

    @property
    def m(self) -> int:
        return len(self.weights)

    @property
    def nilpotency_class(self) -> int:
        return max(self.weights, default=0)

    @property
    def torsion(self) -> dict[int, int]:
        return {i: e for i, e in enumerate(self.exponents) if e is not None}

    def identity(self) -> Coords:
        return (0,) * self.m

    def unit(self, i: int, e: int = 1) -> Coords:
        v = [0] * self.m
        v[i] = e
        return tuple(v)

    def name(self, i: int) -> str:
        if self.names is not None:
            return self.names[i]
        return f"a{i + 1}"

    def conj_tail(self, i: int, j: int) -> Coords:
        return self.conj_tails.get((i, j), self.identity())

    def power_tail(self, i: int) -> Coords:
        return self.power_tails.get(i, self.identity())

    @cached_property
    def collector(self):
        from .collection import Collector

        return Collector(self)

    # -- validation --------------------------------------------------------

    def _check_tail(self, tail: Coords, after: int, what: str) -> None:
        if len(tail) != self.m:
            raise PresentationError(f"{what}: tail has length {len(tail)}, expected {self.m}")
        for k in range(after + 1):
            if tail[k]:
                raise PresentationError(f"{what}: tail touches index <= {after + 1}")

    def _validate(self) -> None:
        m = self.m
        if len(self.exponents) != m:
            raise PresentationError("exponents and weights differ in length")
        if self.names is not None and len(self.names) != m:
            raise PresentationError("names and weights differ in length")
        for i, w in enumerate(self.weights):
            if w < 1:
                raise PresentationError(f"weight of a{i + 1} must be positive")
            if i and w < self.weights[i - 1]:
                raise PresentationError(f"weights not nondecreasing at a{i + 1}")
        for i, e in enumerate(self.exponents):
            if e is not None and e < 2:
                raise PresentationError(f"relative order of a{i + 1} must be >= 2, got {e}")
        for i, tail in self.power_tails.items():
            if self.exponents[i] is None:
                raise PresentationError(f"power tail given for torsion-free a{i + 1}")
            self._check_tail(tail, i, f"pow {i + 1}")
        for (i, j), tail in self.conj_tails.items():
            if not 0 <= i < j < m:
                raise PresentationError(f"conj {j + 1} {i + 1}: need i < j")
            what = f"conj {j + 1} {i + 1}"
            self._check_tail(tail, j, what)
            floor = self.weights[i] + self.weights[j]
            for k in range(j + 1, m):
                if tail[k] and self.weights[k] < floor:
                    raise PresentationError(f"{what}: tail uses a{k + 1} of weight below {floor}")

    def _derive_inverse_tails(self) -> dict[tuple[int, int], Coords]:
        # beta_{ij} = a_j a_i^{-1} a_j^{-1} a_i
        col = self.collector
        out = {}
        for i in range(self.m):
            for j in range(i + 1, self.m):
                t = col.word_to_coords(((j, 1), (i, -1), (j, -1), (i, 1)))
                if any(t):
                    out[(i, j)] = t
        return out

    # -- derived presentations ---------------------------------------------

    def sub_presentation(self, start: int, weights: Optional[Sequence[int]] = None) -> "NilpotentPresentation":
        """Presentation of the suffix subgroup <a_start, ..., a_m>."""
        def cut(t: Coords) -> Coords:
            return tuple(t[start:])

        names = self.names[start:] if self.names is not None else None
        return NilpotentPresentation(
            weights=tuple(weights) if weights is not None else self.weights[start:],
            exponents=self.exponents[start:],
            power_tails={i - start: cut(t) for i, t in self.power_tails.items() if i >= start},
            conj_tails={(i - start, j - start): cut(t) for (i, j), t in self.conj_tails.items() if i >= start},
            conj_inv_tails={(i - start, j - start): cut(t) for (i, j), t in self.conj_inv_tails.items() if i >= start},
            names=names,
        )

    def truncate(self, stop: int) -> "NilpotentPresentation":
        """Presentation of G / <a_stop, ..., a_m> (drop the trailing generators)."""
        def cut(t: Coords) -> Coords:
            return tuple(t[:stop])

        return NilpotentPresentation(
            weights=self.weights[:stop],
            exponents=self.exponents[:stop],
            power_tails={i: cut(t) for i, t in self.power_tails.items() if i < stop},
            conj_tails={(i, j): cut(t) for (i, j), t in self.conj_tails.items() if j < stop},
            conj_inv_tails={(i, j): cut(t) for (i, j), t in self.conj_inv_tails.items() if j < stop},
            names=self.names[:stop] if self.names is not None else None,
        )


def _clean_tails(tails, m):
    out = {}
    for key, t in dict(tails).items():
        t = tuple(int(x) for x in t)
        if len(t) < m:
            raise PresentationError(f"tail {t} shorter than {m}")
        if any(t):
            out[key] = t
    return out


def trivial_presentation() -> NilpotentPresentation:
    return NilpotentPresentation(weights=(), exponents=())


# ---------------------------------------------------------------------------
# words


def free_reduce(letters: Iterable[Letter]) -> GroupWord:
    """Merge adjacent syllables on the same generator and drop zero exponents."""
    out: list[list[int]] = []
    for g, e in letters:
        if not e:
            continue
        if out and out[-1][0] == g:
            out[-1][1] += e
            if not out[-1][1]:
                out.pop()
        else:
            out.append([g, e])
    return tuple((g, e) for g, e in out)


def word_length(w: GroupWord) -> int:
    return sum(abs(e) for _, e in w)


def invert_word(w: GroupWord) -> GroupWord:
    return tuple((g, -e) for g, e in reversed(w))


_TOKEN = re.compile(r"^([A-Za-z_][A-Za-z_0-9]*?)(?:\^(-?\d+))?$")


def parse_word(text: str, m: Optional[int] = None, names: Optional[Sequence[str]] = None) -> GroupWord:
    """Parse ``a1 a2^-3 ...``; ``names`` adds aliases for the generators."""
    lookup = {}
    if names is not None:
        lookup = {n: i for i, n in enumerate(names)}
    letters = []
    text = text.strip()
    if text in ("", "1", "eps"):
        return ()
    pos = 0
    for tok in text.split():
        col = text.index(tok, pos) + 1
        pos = col - 1 + len(tok)
        mt = _TOKEN.match(tok)
        if not mt:
            raise PresentationError(f"bad word token {tok!r}", column=col)
        base, exp = mt.group(1), mt.group(2)
        if base in lookup:
            g = lookup[base]
        elif re.fullmatch(r"a\d+", base):
            g = int(base[1:]) - 1
        else:
            raise PresentationError(f"unknown generator {base!r}", column=col)
        if g < 0 or (m is not None and g >= m):
            raise PresentationError(f"generator {base!r} out of range", column=col)
        letters.append((g, 1 if exp is None else int(exp)))
    return free_reduce(letters)


def format_word(w: GroupWord, names: Optional[Sequence[str]] = None) -> str:
    if not w:
        return "1"
    parts = []
    for g, e in w:
        base = names[g] if names is not None else f"a{g + 1}"
        parts.append(base if e == 1 else f"{base}^{e}")
    return " ".join(parts)


def normal_word(g: Coords) -> GroupWord:
    return tuple((i, e) for i, e in enumerate(g) if e)


def parse_coords(text: str, m: Optional[int] = None) -> Coords:
    body = text.strip()
    if not (body.startswith("(") and body.endswith(")")):
        raise PresentationError(f"coordinates must look like (c1, ..., cm): {text!r}")
    inner = body[1:-1].strip()
    try:
        vals = tuple(int(x) for x in inner.split(",")) if inner else ()
    except ValueError:
        raise PresentationError(f"bad coordinate tuple {text!r}") from None
    if m is not None and len(vals) != m:
        raise PresentationError(f"expected {m} coordinates, got {len(vals)}")
    return vals


def format_coords(g: Sequence[int]) -> str:
    return "(" + ", ".join(str(x) for x in g) + ")"


# ---------------------------------------------------------------------------
# presentation file format


def parse_presentation(text: str) -> NilpotentPresentation:
    m = None
    weights: dict[int, int] = {}
    exps: dict[int, int] = {}
    power: dict[int, Coords] = {}
    conj: dict[tuple[int, int], Coords] = {}
    conjinv: dict[tuple[int, int], Coords] = {}
    names: dict[int, str] = {}
    seen = set()

    def index(tok: str, ln: int, col: int) -> int:
        try:
            i = int(tok)
        except ValueError:
            raise PresentationError(f"expected a generator index, got {tok!r}", ln, col) from None
        if m is None:
            raise PresentationError("'gens' must come first", ln, col)
        if not 1 <= i <= m:
            raise PresentationError(f"index {i} out of range 1..{m}", ln, col)
        return i - 1

    def tail(toks: list[str], after: int, ln: int, what: str) -> Coords:
        try:
            vals = [int(t) for t in toks]
        except ValueError:
            raise PresentationError(f"{what}: tail entries must be integers", ln) from None
        want = m - after - 1
        if len(vals) > want:
            raise PresentationError(f"{what}: tail touches index <= {after + 1}", ln)
        vals += [0] * (want - len(vals))
        return (0,) * (after + 1) + tuple(vals)

    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(":")
        toks = head.split()
        kw = toks[0]
        col = raw.index(kw) + 1
        tail_toks = rest.split()
        if kw == "gens":
            if m is not None:
                raise PresentationError("duplicate 'gens'", ln, col)
            if len(toks) != 2 or not toks[1].isdigit():
                raise PresentationError("usage: gens <m>", ln, col)
            m = int(toks[1])
        elif kw == "weight":
            if len(toks) != 3:
                raise PresentationError("usage: weight <i> <w>", ln, col)
            i = index(toks[1], ln, col)
            try:
                weights[i] = int(toks[2])
            except ValueError:
                raise PresentationError("weight must be an integer", ln, col) from None
        elif kw == "name":
            if len(toks) != 3:
                raise PresentationError("usage: name <i> <string>", ln, col)
            names[index(toks[1], ln, col)] = toks[2]
        elif kw == "pow":
            if len(toks) != 3 or not _:
                raise PresentationError("usage: pow <i> <e> : <tail>", ln, col)
            i = index(toks[1], ln, col)
            try:
                e = int(toks[2])
            except ValueError:
                raise PresentationError("exponent must be an integer", ln, col) from None
            if e < 2:
                raise PresentationError(f"relative order of a{i + 1} must be >= 2, got {e}", ln, col)
            exps[i] = e
            power[i] = tail(tail_toks, i, ln, f"pow {i + 1}")
        elif kw in ("conj", "conjinv"):
            if len(toks) != 3 or not _:
                raise PresentationError(f"usage: {kw} <j> <i> : <tail>", ln, col)
            j, i = index(toks[1], ln, col), index(toks[2], ln, col)
            if not i < j:
                raise PresentationError(f"{kw} {j + 1} {i + 1}: need i < j", ln, col)
            key = (kw, i, j)
            if key in seen:
                raise PresentationError(f"duplicate {kw} {j + 1} {i + 1}", ln, col)
            seen.add(key)
            target = conj if kw == "conj" else conjinv
            target[(i, j)] = tail(tail_toks, j, ln, f"{kw} {j + 1} {i + 1}")
        else:
            raise PresentationError(f"unknown directive {kw!r}", ln, col)
    if m is None:
        raise PresentationError("missing 'gens'")
    missing = [i + 1 for i in range(m) if i not in weights]
    if missing:
        raise PresentationError(f"missing weight for generators {missing}")
    return NilpotentPresentation(
        weights=tuple(weights[i] for i in range(m)),
        exponents=tuple(exps.get(i) for i in range(m)),
        power_tails=power,
        conj_tails=conj,
        conj_inv_tails=conjinv if any(k[0] == "conjinv" for k in seen) else None,
        names=tuple(names.get(i, f"a{i + 1}") for i in range(m)) if names else None,
    )


def format_presentation(p: NilpotentPresentation, with_inverse: bool = True) -> str:
    lines = [f"gens {p.m}"]
    for i, w in enumerate(p.weights):
        lines.append(f"weight {i + 1} {w}")
    if p.names is not None:
        for i, n in enumerate(p.names):
            lines.append(f"name {i + 1} {n}")

    def body(t: Coords, after: int) -> str:
        vals = list(t[after + 1:])
        while vals and vals[-1] == 0:
            vals.pop()
        return " ".join(str(v) for v in vals)

    for i, e in enumerate(p.exponents):
        if e is not None:
            lines.append(f"pow {i + 1} {e} : {body(p.power_tail(i), i)}".rstrip())
    for (i, j) in sorted(p.conj_tails, key=lambda k: (k[1], k[0])):
        lines.append(f"conj {j + 1} {i + 1} : {body(p.conj_tails[i, j], j)}")
    if with_inverse:
        for (i, j) in sorted(p.conj_inv_tails, key=lambda k: (k[1], k[0])):
            lines.append(f"conjinv {j + 1} {i + 1} : {body(p.conj_inv_tails[i, j], j)}")
    return "\n".join(lines) + "\n"
