"""Overlap-based classification of finite rewriting systems.

An overlap between a right-hand side r and a left-hand side l (renamed
apart) is a unification at a non-variable position of one term with the
whole of the other.  Each class forbids some overlap shapes:

* top-down: l may only sit inside r, and must be an instance of the
  subterm it unifies with;
* bottom-up: the top-down test on the inverse system;
* prefix: only root overlaps, with one side an instance of the other;
* suffix: the embedded term must equal the host subterm up to renaming.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .rewriting import RewriteRule, Trs, UnsupportedSystem
from .terms import (
    App,
    Position,
    RankedAlphabet,
    Term,
    TermError,
    Var,
    format_term,
    match,
    rename_apart,
    strip_comment,
    subterm_at,
    subterms,
    unify,
    variant,
)

TOPDOWN, BOTTOMUP, PREFIX, SUFFIX = "TopDown", "BottomUp", "Prefix", "Suffix"
CLASSES = (TOPDOWN, BOTTOMUP, PREFIX, SUFFIX)

ROOT, LHS_IN_RHS, RHS_IN_LHS = "Root", "LhsInsideRhs", "RhsInsideLhs"


@dataclass(frozen=True)
class Overlap:
    rhs_rule: int
    lhs_rule: int
    kind: str
    position: Position
    unifier: Tuple[Tuple[str, Term], ...]
    rhs: Term
    lhs: Term
    note: str = ""

    @property
    def host(self) -> Term:
        return self.lhs if self.kind == RHS_IN_LHS else self.rhs

    @property
    def embedded(self) -> Term:
        return self.rhs if self.kind == RHS_IN_LHS else self.lhs

    def describe(self) -> str:
        pos = "ε" if not self.position else ".".join(map(str, self.position))
        text = (f"{self.kind} at {pos}: rhs {format_term(self.rhs)} (rule {self.rhs_rule + 1}) / "
                f"lhs {format_term(self.lhs)} (rule {self.lhs_rule + 1})")
        return f"{text} [{self.note}]" if self.note else text


@dataclass
class ClassReport:
    classes: FrozenSet[str]
    witnesses: Dict[str, Overlap] = field(default_factory=dict)

    def __contains__(self, name: str) -> bool:
        return name in self.classes

    def format(self) -> str:
        lines = []
        for name in CLASSES:
            if name in self.classes:
                lines.append(f"{name}: yes")
            else:
                lines.append(f"{name}: no  -- {self.witnesses[name].describe()}")
        return "\n".join(lines) + "\n"


def critical_overlaps(r: Term, l: Term, rhs_rule: int = 0, lhs_rule: int = 0) -> List[Overlap]:
    """All overlaps of ``l`` inside ``r`` and of ``r`` strictly inside ``l``.

    ``r`` and ``l`` must not share variables.
    """
    out = []
    for p, sub in subterms(r):
        if isinstance(sub, Var):
            continue
        mgu = unify(sub, l)
        if mgu is not None:
            out.append(Overlap(rhs_rule, lhs_rule, ROOT if not p else LHS_IN_RHS, p,
                               tuple(sorted(mgu.items())), r, l))
    for p, sub in subterms(l):
        if not p or isinstance(sub, Var):
            continue
        mgu = unify(sub, r)
        if mgu is not None:
            out.append(Overlap(rhs_rule, lhs_rule, RHS_IN_LHS, p, tuple(sorted(mgu.items())), r, l))
    return out


def violates_topdown(ov: Overlap) -> bool:
    if ov.kind == RHS_IN_LHS:
        return True
    return match(subterm_at(ov.rhs, ov.position), ov.lhs) is None


def violates_prefix(ov: Overlap) -> bool:
    if ov.position:
        return True
    return match(ov.rhs, ov.lhs) is None and match(ov.lhs, ov.rhs) is None


def violates_suffix(ov: Overlap) -> bool:
    return not variant(ov.embedded, subterm_at(ov.host, ov.position))


def _all_overlaps(pairs: Sequence[Tuple[Term, Term]]) -> List[Overlap]:
    out = []
    for i, (_, r) in enumerate(pairs):
        for j, (l, _) in enumerate(pairs):
            out.extend(critical_overlaps(r, rename_apart(l), i, j))
    return out


def _first(overlaps: Iterable[Overlap], test) -> Optional[Overlap]:
    for ov in overlaps:
        if test(ov):
            return ov
    return None


def _topdown_witness(overlaps: List[Overlap]) -> Optional[Overlap]:
    ov = _first(overlaps, violates_topdown)
    if ov is not None and ov.kind == ROOT and match(ov.lhs, ov.rhs) is not None:
        # l strictly more general than r at the root: rejected by the strict reading
        ov = Overlap(*[getattr(ov, f) for f in ("rhs_rule", "lhs_rule", "kind", "position", "unifier", "rhs", "lhs")],
                     note="root overlap with lhs more general than rhs")
    return ov


def classify(R: Trs) -> ClassReport:
    if R.recognizable:
        raise UnsupportedSystem("classification of recognizable (automaton-pair) systems is not supported")
    pairs = [(rule.lhs, rule.rhs) for rule in R.rules]
    forward = _all_overlaps(pairs)
    backward = _all_overlaps([(r, l) for l, r in pairs])
    witnesses = {}
    for name, found in (
        (TOPDOWN, _topdown_witness(forward)),
        (BOTTOMUP, _topdown_witness(backward)),
        (PREFIX, _first(forward, violates_prefix)),
        (SUFFIX, _first(forward, violates_suffix)),
    ):
        if found is not None:
            witnesses[name] = found
    return ClassReport(frozenset(c for c in CLASSES if c not in witnesses), witnesses)


def witness_is_genuine(name: str, ov: Overlap) -> bool:
    test = {TOPDOWN: violates_topdown, BOTTOMUP: violates_topdown,
            PREFIX: violates_prefix, SUFFIX: violates_suffix}[name]
    return test(ov) and unify(subterm_at(ov.host, ov.position), ov.embedded) is not None


# ---------------------------------------------------------------------------
# Turing machines as prefix systems

BLANK = "#"
END, CELL = "#0", "#1"


@dataclass(frozen=True)
class TuringMachine:
    states: Tuple[str, ...]
    tape: Tuple[str, ...]
    transitions: Tuple[Tuple[str, str, str, str, str], ...]  # (p, A, q, B, '+'|'-')

    def __post_init__(self):
        reserved = {BLANK, END, CELL, "x", "y"}
        clash = (set(self.states) | set(self.tape)) & reserved
        if clash or set(self.states) & set(self.tape):
            raise TermError(f"machine symbols clash with reserved or each other: {sorted(clash)}")
        for p, a, q, b, d in self.transitions:
            if p not in self.states or q not in self.states:
                raise TermError(f"transition {p} {a} -> {q} {b} {d}: unknown state")
            if a != BLANK and a not in self.tape or b not in self.tape:
                raise TermError(f"transition {p} {a} -> {q} {b} {d}: unknown tape symbol")
            if d not in "+-" or len(d) != 1:
                raise TermError(f"transition direction must be + or -, got {d!r}")


def encode_turing_machine(M: TuringMachine) -> Trs:
    """Root-rewriting system simulating ``M``.

    A configuration is ``p(left, right)``: ``left`` is the reversed tape left
    of the head, ``right`` starts with the scanned cell; ``#0`` marks an
    end of the tape and ``#1`` a blank cell.
    """
    alphabet = RankedAlphabet(
        tuple((q, 2) for q in M.states) + tuple((a, 1) for a in M.tape) + ((END, 0), (CELL, 1))
    )
    x, y = Var("x"), Var("y")
    end = App(END, ())

    def cell(a, t):
        return App(CELL if a == BLANK else a, (t,))

    rules: List[RewriteRule] = []
    for p, a, q, b, d in M.transitions:
        if d == "+":
            rules.append(RewriteRule(App(p, (x, cell(a, y))), App(q, (App(b, (x,)), y))))
            if a == BLANK:
                rules.append(RewriteRule(App(p, (x, end)), App(q, (App(b, (x,)), end))))
        else:
            for c in M.tape:
                rules.append(RewriteRule(App(p, (App(c, (x,)), cell(a, y))), App(q, (x, App(c, (App(b, (y,)),))))))
            rules.append(RewriteRule(App(p, (end, cell(a, y))), App(q, (end, App(CELL, (App(b, (y,)),))))))
            if a == BLANK:
                rules.append(RewriteRule(App(p, (end, end)), App(q, (end, App(CELL, (App(b, (end,)),))))))
                for c in M.tape:
                    rules.append(RewriteRule(App(p, (App(c, (x,)), end)), App(q, (x, App(c, (App(b, (end,)),))))))
    unique = list(dict.fromkeys(rules))
    return Trs(alphabet, tuple(unique), (), ("x", "y"))


def parse_tm(text: str) -> TuringMachine:
    states: List[str] = []
    tape: List[str] = []
    trans = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        raw_parts = raw.split()
        if raw_parts[:1] == ["trans"]:
            # the blank symbol is a bare '#', so only text after the 7 fields is a comment
            parts, rest = raw_parts[:7], raw_parts[7:]
            if rest and not rest[0].startswith("#"):
                raise TermError(f"line {lineno}: trailing text after transition")
            line = " ".join(parts)
        else:
            line = strip_comment(raw)
            parts = line.split()
        if not line:
            continue
        if parts[0] == "state":
            states.extend(parts[1:])
        elif parts[0] == "tape":
            tape.extend(parts[1:])
        elif parts[0] == "trans" and len(parts) == 7 and parts[3] == "->":
            trans.append((parts[1], parts[2], parts[4], parts[5], parts[6]))
        else:
            raise TermError(f"line {lineno}: cannot parse {line!r}")
    return TuringMachine(tuple(states), tuple(tape), tuple(trans))
