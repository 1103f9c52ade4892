"""Command-line interface.

Exit status: 0 computed / positive answer, 1 negative answer, 2 input error.
"""
from __future__ import annotations

import argparse
import os
import sys
from typing import Optional, Sequence

from .conjugacy import centralizer, conjugacy
from .consistency import check_consistency
from .freenil import free_nilpotent, from_finite_presentation
from .morphism import Homomorphism, NotInImage, apply, kernel_and_image, preimage, relation_failures, word_witness
from .presentation import (
    NilpotentPresentation,
    PresentationError,
    format_coords,
    format_presentation,
    format_word,
    normal_word,
    parse_coords,
    parse_presentation,
    parse_word,
)
from .slp import format_slp, parse_slp, slp_to_coords
from .subgroup import (
    NotMember,
    compress_presentation,
    express_as_program,
    express_in_input_generators,
    membership,
    presentation_relators,
    reduce_to_full_form,
    subgroup_presentation,
)


class InputError(Exception):
    pass


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _load_group(path: str) -> NilpotentPresentation:
    try:
        return parse_presentation(_read(path))
    except PresentationError as exc:
        raise InputError(f"{path}: {exc}") from None


def _element(P: NilpotentPresentation, text: str, mode: str):
    """Coordinates of an element given as a word, a coordinate tuple or an SLP file."""
    if mode == "slp":
        return slp_to_coords(P, parse_slp(_read(text)))
    if mode == "coords" or text.strip().startswith("("):
        g = parse_coords(text, P.m)
        return P.collector.normalize_torsion(g)
    return P.collector.word_to_coords(parse_word(text, P.m, P.names))


def _mode(args) -> str:
    if getattr(args, "slp", False):
        return "slp"
    if getattr(args, "coords", False):
        return "coords"
    return "word"


def _show(P: NilpotentPresentation, g) -> str:
    return f"{format_coords(g)}\n{format_word(normal_word(g), P.names)}"


def _out(text: str) -> None:
    sys.stdout.write(text if text.endswith("\n") else text + "\n")


# ---------------------------------------------------------------------------
# commands


def cmd_nf(args) -> int:
    P = _load_group(args.group)
    _out(_show(P, _element(P, args.element, _mode(args))))
    return 0


def cmd_mul(args) -> int:
    P = _load_group(args.group)
    col = P.collector
    v = list(P.identity())
    for e in args.elements:
        col.multiply_into(v, _element(P, e, _mode(args)))
    _out(_show(P, tuple(v)))
    return 0


def cmd_pow(args) -> int:
    P = _load_group(args.group)
    g = _element(P, args.element, _mode(args))
    _out(_show(P, tuple(P.collector.power(g, args.n))))
    return 0


def cmd_consistency(args) -> int:
    P = _load_group(args.group)
    rep = check_consistency(P)
    if rep.consistent:
        _out("consistent")
        return 0
    _out(f"inconsistent at overlap {rep.overlap}")
    _out(f"witness {format_coords(rep.witness)} = {format_word(rep.witness_word, P.names)}")
    return 1


def cmd_free_nilpotent(args) -> int:
    P, basis = free_nilpotent(args.c, args.r)
    lines = [f"# a{b.index + 1} = {b.label(basis)}" for b in basis]
    _out("\n".join(lines) + "\n" + format_presentation(P))
    return 0


def _parse_fp(args):
    names = args.gens
    rels = [parse_word(r, len(names), names) for r in args.rel]
    return names, rels


def cmd_from_presentation(args) -> int:
    names, rels = _parse_fp(args)
    q = from_finite_presentation(names, rels, args.c)
    lines = [f"# {n} -> {format_coords(v)}" for n, v in zip(names, q.iso)]
    _out("\n".join(lines) + "\n" + format_presentation(q.presentation))
    return 0


def _subgroup(args, P):
    return [_element(P, s, _mode(args)) for s in args.sub]


def cmd_fullform(args) -> int:
    P = _load_group(args.group)
    F = reduce_to_full_form(P, _subgroup(args, P))
    _out(F.serialize() or "trivial")
    return 0


def cmd_member(args) -> int:
    P = _load_group(args.group)
    gens = _subgroup(args, P)
    h = _element(P, args.element, _mode(args))
    if args.express or args.program:
        try:
            if args.program:
                A = express_as_program(P, gens, h)
            else:
                w = express_in_input_generators(P, gens, h)
        except NotMember:
            _out("NO")
            return 1
        except OverflowError as exc:
            raise InputError(f"{exc}; use --program for a compressed expression") from None
        _out("YES")
        if args.program:
            _out(format_slp(A, letter="h").rstrip("\n"))
        else:
            _out(format_word(w, [f"h{i + 1}" for i in range(len(gens))]))
        return 0
    F = reduce_to_full_form(P, gens)
    gam = membership(P, F, h)
    if gam is None:
        _out("NO")
        return 1
    # re-verify the witness
    col = P.collector
    v = list(P.identity())
    for row, k in zip(F.rows, gam):
        col.multiply_into(v, col.power(row, k))
    assert tuple(v) == h
    _out("YES")
    _out("gamma " + format_coords(gam))
    return 0


def cmd_subpres(args) -> int:
    P = _load_group(args.group)
    H, F = subgroup_presentation(P, _subgroup(args, P))
    lines = [f"# h{i + 1} = {format_coords(r)}" for i, r in enumerate(F.rows)]
    _out("\n".join(lines + [format_presentation(H)]))
    return 0


def cmd_compress(args) -> int:
    P = _load_group(args.group)
    if args.sub:
        P, _ = subgroup_presentation(P, _subgroup(args, P))
    _out(compress_presentation(presentation_relators(P)).format())
    return 0


def _load_hom(path: str) -> Homomorphism:
    base = os.path.dirname(os.path.abspath(path))
    src = tgt = None
    maps = []
    for ln, raw in enumerate(_read(path).splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        kw, _, rest = line.partition(" ")
        rest = rest.strip()
        if kw in ("source", "target"):
            p = rest if os.path.isabs(rest) else os.path.join(base, rest)
            if kw == "source":
                src = _load_group(p)
            else:
                tgt = _load_group(p)
        elif kw == "map":
            if "->" not in rest:
                raise InputError(f"{path}: line {ln}: expected 'map <word> -> <word>'")
            left, right = (x.strip() for x in rest.split("->", 1))
            maps.append((ln, left, right))
        else:
            raise InputError(f"{path}: line {ln}: unknown directive {kw!r}")
    if src is None or tgt is None:
        raise InputError(f"{path}: needs both 'source' and 'target'")
    pairs = []
    for ln, left, right in maps:
        try:
            pairs.append((_element(src, left, "word"), _element(tgt, right, "word")))
        except PresentationError as exc:
            raise InputError(f"{path}: line {ln}: {exc}") from None
    return Homomorphism(src, tgt, tuple(pairs))


def cmd_kernel(args) -> int:
    phi = _load_hom(args.hom)
    ki = kernel_and_image(phi)
    tracked = reduce_to_full_form(phi.source, [g for g, _ in phi.pairs], track=True)
    for u in ki.kernel.rows:
        if apply(phi, u, tracked) != phi.target.identity():
            raise AssertionError("kernel row does not map to the identity")
    _out(ki.kernel.serialize() or "trivial")
    return 0


def cmd_check_hom(args) -> int:
    phi = _load_hom(args.hom)
    bad = relation_failures(phi)
    if not bad:
        _out("WELL-DEFINED")
        return 0
    _out("NOT WELL-DEFINED")
    names = [f"k{i + 1}" for i in range(phi.source.m)]
    for rel in bad:
        _out("relator " + format_word(rel, names))
    return 1


def cmd_image(args) -> int:
    phi = _load_hom(args.hom)
    _out(kernel_and_image(phi).image.serialize() or "trivial")
    return 0


def cmd_preimage(args) -> int:
    phi = _load_hom(args.hom)
    h = _element(phi.target, args.element, _mode(args))
    try:
        g = preimage(phi, h)
    except NotInImage:
        _out("NO")
        return 1
    _out(_show(phi.source, g))
    return 0


def cmd_centralizer(args) -> int:
    P = _load_group(args.group)
    C = centralizer(P, _element(P, args.element, _mode(args)))
    _out(C.serialize() or "trivial")
    return 0


def cmd_conjugate(args) -> int:
    P = _load_group(args.group)
    g = _element(P, args.g, _mode(args))
    h = _element(P, args.h, _mode(args))
    res = conjugacy(P, g, h)
    if not res:
        _out("NO")
        return 1
    assert P.collector.conjugate(g, res.u) == h
    _out(f"YES u = {format_word(normal_word(res.u), P.names)}")
    return 0


def cmd_witness_word(args) -> int:
    names, rels = _parse_fp(args)
    q = from_finite_presentation(names, rels, args.c)
    w = parse_word(args.word, len(names), names)
    res = word_witness(q, w)
    if not res.trivial:
        _out(f"NONTRIVIAL {format_coords(res.coords)}")
        return 1
    _out("TRIVIAL")
    for i, s, conj in res.conjugates:
        _out(f"r{i + 1}{'' if s > 0 else '^-1'} by {format_word(conj, names)}")
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="malcev", description="Exact computation in nilpotent groups.")
    sub = ap.add_subparsers(dest="command", required=True)

    def group_cmd(name, fn, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--group", required=True, help="presentation file")
        rep = p.add_mutually_exclusive_group()
        rep.add_argument("--coords", action="store_true", help="elements are coordinate tuples")
        rep.add_argument("--slp", action="store_true", help="elements are SLP files")
        p.set_defaults(func=fn)
        return p

    p = group_cmd("nf", cmd_nf, "normal form of an element")
    p.add_argument("element")
    p = group_cmd("mul", cmd_mul, "product of elements")
    p.add_argument("elements", nargs="+")
    p = group_cmd("pow", cmd_pow, "power of an element")
    p.add_argument("element")
    p.add_argument("n", type=int)
    group_cmd("consistency", cmd_consistency, "check consistency")

    p = sub.add_parser("free-nilpotent", help="free nilpotent group presentation")
    p.add_argument("-c", type=int, required=True)
    p.add_argument("-r", type=int, required=True)
    p.set_defaults(func=cmd_free_nilpotent)

    def fp_cmd(name, fn, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("-c", type=int, required=True, help="nilpotency class")
        p.add_argument("--gens", nargs="+", required=True, help="generator names")
        p.add_argument("--rel", action="append", default=[], help="relator word (repeatable)")
        p.set_defaults(func=fn)
        return p

    fp_cmd("from-presentation", cmd_from_presentation, "nilpotent quotient of <X | R>")
    p = fp_cmd("witness-word", cmd_witness_word, "word problem with relator-conjugate witness")
    p.add_argument("word")

    p = group_cmd("fullform", cmd_fullform, "full form of a subgroup")
    p.add_argument("--sub", nargs="*", default=[], required=True)
    p = group_cmd("member", cmd_member, "subgroup membership")
    p.add_argument("--sub", nargs="*", default=[], required=True)
    how = p.add_mutually_exclusive_group()
    how.add_argument("--express", action="store_true", help="print a word over the subgroup generators")
    how.add_argument("--program", action="store_true", help="print a straight-line program over the subgroup generators")
    p.add_argument("element")
    p = group_cmd("subpres", cmd_subpres, "presentation of a subgroup")
    p.add_argument("--sub", nargs="*", default=[], required=True)
    p = group_cmd("compress-pres", cmd_compress, "relators with exponents replaced by programs")
    p.add_argument("--sub", nargs="*", default=None)

    for name, fn, help_ in (
        ("kernel", cmd_kernel, "kernel of a homomorphism"),
        ("image", cmd_image, "image of a homomorphism"),
        ("check-hom", cmd_check_hom, "check that the generator images define a homomorphism"),
    ):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--hom", required=True)
        p.set_defaults(func=fn)
    p = sub.add_parser("preimage", help="preimage of an element")
    p.add_argument("--hom", required=True)
    rep = p.add_mutually_exclusive_group()
    rep.add_argument("--coords", action="store_true")
    rep.add_argument("--slp", action="store_true")
    p.add_argument("element")
    p.set_defaults(func=cmd_preimage)

    p = group_cmd("centralizer", cmd_centralizer, "centralizer of an element")
    p.add_argument("element")
    p = group_cmd("conjugate", cmd_conjugate, "conjugacy with conjugator u (u^-1 g u = h)")
    p.add_argument("g")
    p.add_argument("h")
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (InputError, PresentationError, ValueError, MemoryError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
