"""Batch command-line front end.

Exit codes: 0 ok, 1 usage, 2 parse error, 3 class veto, 4 selfcheck failure.
Every file argument accepts ``-`` for stdin.
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import Optional, Sequence

from .automata import TreeAutomaton, enumerate_language, format_automaton, parse_automaton
from .classifier import classify, encode_turing_machine, parse_tm
from .grammars import TupleGrammar, contains_tuple, enumerate_tuples, format_grammar, parse_grammar, sorted_tuples
from .rewriting import Trs, UnsupportedSystem, format_trs, parse_trs, reachable, sorted_terms, suffix_reachable, topdown_reachable
from .suffix import build_suffix_grammar, image_automaton_suffix
from .terms import RankedAlphabet, TermError, format_term, format_word, parse_term
from .topdown import (
    ClassVeto,
    bounded_preimages,
    build_bottomup,
    build_grammar,
    image_automaton,
    inverse_image_automaton,
    refuse_inverse_image,
)

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_VETO, EXIT_FAILED = 0, 1, 2, 3, 4


class ParseFailure(Exception):
    pass


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise ParseFailure(f"{path}: {exc.strerror}") from exc


def _base_dir(path: str) -> str:
    return "." if path == "-" else os.path.dirname(os.path.abspath(path))


class Workspace:
    """Loaded artifacts sharing one alphabet; arity clashes are rejected."""

    def __init__(self):
        self.alphabet: Optional[RankedAlphabet] = None

    def _merge(self, path: str, alphabet: RankedAlphabet) -> None:
        try:
            self.alphabet = alphabet if self.alphabet is None else self.alphabet.union(alphabet)
        except TermError as exc:
            raise ParseFailure(f"{path}: {exc}") from exc

    def trs(self, path: str) -> Trs:
        try:
            R = parse_trs(_read(path), _base_dir(path))
        except (TermError, OSError) as exc:
            raise ParseFailure(f"{path}: {exc}") from exc
        self._merge(path, R.alphabet)
        return R

    def automaton(self, path: str) -> TreeAutomaton:
        try:
            A = parse_automaton(_read(path))
        except TermError as exc:
            raise ParseFailure(f"{path}: {exc}") from exc
        self._merge(path, A.alphabet)
        return A

    def grammar(self, path: str) -> TupleGrammar:
        try:
            G = parse_grammar(_read(path))
        except TermError as exc:
            raise ParseFailure(f"{path}: {exc}") from exc
        if G.alphabet is not None:
            self._merge(path, G.alphabet)
        return G

    def term(self, text: str):
        try:
            return parse_term(text, self.alphabet)
        except TermError as exc:
            raise ParseFailure(f"term {text!r}: {exc}") from exc

    def widen(self, R: Trs) -> Trs:
        if self.alphabet is None or self.alphabet == R.alphabet:
            return R
        return Trs(self.alphabet, R.rules, R.recognizable, R.vars)


def _emit(text: str, out: Optional[str]) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


# ---------------------------------------------------------------------------
# commands

def cmd_classify(args) -> int:
    R = Workspace().trs(args.trs)
    sys.stdout.write(classify(R).format())
    return EXIT_OK


def cmd_reach(args) -> int:
    ws = Workspace()
    R = ws.trs(args.trs)
    t = ws.term(args.term)
    fn = {"unrestricted": reachable, "topdown": topdown_reachable, "suffix": suffix_reachable}[args.strategy]
    for s in sorted_terms(fn(R, t, args.steps, args.size)):
        print(format_term(s))
    return EXIT_OK


def _builder(mode: str):
    return {"topdown": build_grammar, "bottomup": build_bottomup, "suffix": build_suffix_grammar}[mode]


def cmd_build(args) -> int:
    R = Workspace().trs(args.trs)
    _emit(format_grammar(_builder(args.mode)(R)), args.out)
    return EXIT_OK


def cmd_enum(args) -> int:
    G = Workspace().grammar(args.grammar)
    for w in sorted_tuples(enumerate_tuples(G, None, args.max_size)):
        print(format_word(w))
    return EXIT_OK


def cmd_check_pair(args) -> int:
    ws = Workspace()
    G = ws.grammar(args.grammar)
    word = tuple(ws.term(x) for x in args.terms)
    found = contains_tuple(G, None, word)
    print("yes" if found else "no")
    return EXIT_OK


def cmd_image(args) -> int:
    ws = Workspace()
    R = ws.trs(args.trs)
    A = ws.automaton(args.automaton)
    R = ws.widen(R)
    if A.alphabet != ws.alphabet:
        A = parse_automaton(format_automaton(A), ws.alphabet)
    if args.mode == "suffix":
        B = image_automaton_suffix(R, A, args.direction)
    elif args.mode == "bottomup":
        if args.direction == "forward":
            raise ClassVeto("forward images need --mode topdown (or the bottom-up inverse direction)")
        B = inverse_image_automaton(R, A)
    elif args.direction == "forward":
        B = image_automaton(R, A)
    else:
        try:
            refuse_inverse_image(R)
        except ClassVeto as exc:
            if args.bounded is None:
                raise ClassVeto(f"{exc}; rerun with --bounded N to enumerate preimages up to size N") from exc
            targets = sorted_terms(enumerate_language(A, args.bounded))
            for s in sorted_terms(bounded_preimages(R, targets, args.bounded)):
                print(format_term(s))
            return EXIT_OK
        B = inverse_image_automaton(R, A)
    _emit(format_automaton(B), args.out)
    return EXIT_OK


def cmd_encode_tm(args) -> int:
    try:
        M = parse_tm(_read(args.tm))
    except TermError as exc:
        raise ParseFailure(f"{args.tm}: {exc}") from exc
    _emit(format_trs(encode_turing_machine(M)), args.out)
    return EXIT_OK


def cmd_selfcheck(args) -> int:
    from .checks import AcceptanceConfig, run_criterion

    cfg = AcceptanceConfig()
    if args.bound is not None:
        cfg.pair_bound = args.bound
        cfg.pair_slack = args.bound + 6
    only = args.only or list(range(1, 10))
    ok = True
    for n in only:
        res = run_criterion(n, cfg)
        print(res.line(), flush=True)
        ok &= res.ok
    return EXIT_OK if ok else EXIT_FAILED


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ratrw", description="Rational derivation relations of linear rewriting systems.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("classify", help="report the syntactic classes of a system")
    s.add_argument("trs")
    s.set_defaults(fn=cmd_classify)

    s = sub.add_parser("reach", help="bounded reachability from a term")
    s.add_argument("trs")
    s.add_argument("term")
    s.add_argument("--steps", type=int, default=None)
    s.add_argument("--size", type=int, default=20)
    s.add_argument("--strategy", choices=("unrestricted", "topdown", "suffix"), default="unrestricted")
    s.set_defaults(fn=cmd_reach)

    s = sub.add_parser("build", help="build the derivation grammar")
    s.add_argument("trs")
    s.add_argument("--mode", choices=("topdown", "bottomup", "suffix"), default="topdown")
    s.add_argument("--out")
    s.set_defaults(fn=cmd_build)

    s = sub.add_parser("enum", help="enumerate the tuples of a grammar")
    s.add_argument("grammar")
    s.add_argument("--max-size", type=int, default=10)
    s.set_defaults(fn=cmd_enum)

    s = sub.add_parser("check-pair", help="membership of a tuple in a grammar")
    s.add_argument("grammar")
    s.add_argument("terms", nargs="+")
    s.set_defaults(fn=cmd_check_pair)

    s = sub.add_parser("image", help="image or inverse image automaton")
    s.add_argument("trs")
    s.add_argument("automaton")
    s.add_argument("--mode", choices=("topdown", "bottomup", "suffix"), default="topdown")
    s.add_argument("--direction", choices=("forward", "inverse"), default="forward")
    s.add_argument("--bounded", type=int, default=None, metavar="N",
                   help="top-down inverse: list preimages of size <= N instead")
    s.add_argument("--out")
    s.set_defaults(fn=cmd_image)

    s = sub.add_parser("encode-tm", help="encode a Turing machine as a rewriting system")
    s.add_argument("tm")
    s.add_argument("--out")
    s.set_defaults(fn=cmd_encode_tm)

    s = sub.add_parser("selfcheck", help="run the acceptance suite")
    s.add_argument("--bound", type=int, default=None, help="pair bound of the top-down oracle check")
    s.add_argument("--only", type=int, nargs="*", help="criterion numbers")
    s.set_defaults(fn=cmd_selfcheck)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return args.fn(args)
    except ParseFailure as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ClassVeto as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_VETO
    except UnsupportedSystem as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_VETO
    except TermError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
