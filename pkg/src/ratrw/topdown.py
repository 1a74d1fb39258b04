"""Derivation grammars for linear top-down systems.

The non-terminals are indexed by the overlap set O: contexts that occur as
rhs subterms and, at the same time, as prefixes of some lhs.  ``⟨t⟩`` with
t an n-context generates the tuples ``(u1, …, un, s)`` with ``t[u] ->* s``;
``⟨*⟩`` generates every ground tree.  Bottom-up systems reuse the same
construction on the inverse system with both projections swapped.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Set, Tuple

from .automata import TreeAutomaton, finite_automaton
from .classifier import BOTTOMUP, TOPDOWN, classify
from .grammars import (
    NonTerminal,
    Production,
    TupleGrammar,
    check,
    enumerate_tuples,
    inst,
    project_split,
    swap_projections,
    synchronize,
)
from .rewriting import Trs, UnsupportedSystem
from .terms import (
    HOLE,
    App,
    Term,
    TermError,
    TermWord,
    Var,
    format_term,
    hole,
    hole_count,
    match,
    positions,
    rename_apart,
    size,
    subterm_at,
    subterms,
    substitute,
    to_context,
    variables,
)

ANY = "Any"
ID = "Id"
SQUARE = hole(1)


class ClassVeto(UnsupportedSystem):
    """The system is outside the class the construction needs."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


@dataclass(frozen=True)
class OverlapContext:
    context: Term
    rhs_rule: Optional[int] = None
    position: Tuple[int, ...] = ()
    lhs_rule: Optional[int] = None

    @property
    def holes(self) -> int:
        return hole_count(self.context)


def prefix_args(c: Term, t: Term) -> Optional[List[Term]]:
    """``u`` with ``c[u] = t``, or None when the context is not a prefix of t."""
    sigma = match(c, t)
    if sigma is None:
        return None
    return [sigma[f"{HOLE}{i}"] for i in range(1, hole_count(c) + 1)]


def require(R: Trs, kind: str = TOPDOWN) -> None:
    if R.recognizable:
        raise UnsupportedSystem("the grammar construction needs a finite rule set")
    if not R.linear:
        raise ClassVeto("the system is not linear")
    report = classify(R)
    if kind not in report:
        w = report.witnesses[kind]
        raise ClassVeto(f"the system is not {kind}: {w.describe()}", w)


def overlap_set(R: Trs, check_class: bool = True) -> List[OverlapContext]:
    """O in canonical order (□ first, then by size and text)."""
    if check_class:
        require(R)
    lhss = [rename_apart(rule.lhs) for rule in R.rules]
    found: Dict[Term, OverlapContext] = {SQUARE: OverlapContext(SQUARE)}
    for i, rule in enumerate(R.rules):
        for p, sub in subterms(rule.rhs):
            c, _ = to_context(sub)
            if c in found:
                continue
            for j, l in enumerate(lhss):
                if prefix_args(c, l) is not None:
                    found[c] = OverlapContext(c, i, p, j)
                    break
    rest = sorted((c for c in found if c != SQUARE), key=lambda c: (size(c), format_term(c)))
    return [found[SQUARE]] + [found[c] for c in rest]


def _domain_leq(a: Term, b: Term) -> bool:
    return prefix_args(a, b) is not None


def maximal_prefix(O: Sequence[Term], l: Term) -> Term:
    cands = [c for c in O if prefix_args(c, l) is not None]
    tops = [c for c in cands if not any(d != c and _domain_leq(c, d) for d in cands)]
    if len(tops) != 1:
        raise TermError(f"no unique maximal overlap prefix of {format_term(l)}: {[format_term(c) for c in tops]}")
    return tops[0]


def rhs_cover(O: Sequence[Term], r: Term) -> Tuple[Term, List[Term]]:
    """``r = s[v]`` with the v the topmost subterms whose contexts lie in O."""
    members = set(O)
    picked: List[Tuple[int, ...]] = []
    for p in positions(r):
        if any(p[: len(q)] == q for q in picked):
            continue
        if to_context(subterm_at(r, p))[0] in members:
            picked.append(p)
    counter = iter(range(1, len(picked) + 1))

    def cut(t: Term, here: Tuple[int, ...]) -> Term:
        if here in picked:
            return hole(next(counter))
        if isinstance(t, Var):
            raise TermError(f"variable {t.name} is not covered")  # □ ∈ O makes this unreachable
        return App(t.sym, tuple(cut(a, here + (k,)) for k, a in enumerate(t.args, 1)))

    s = cut(r, ())
    return s, [subterm_at(r, p) for p in picked]


class _Builder:
    def __init__(self, R: Trs, O: List[OverlapContext]):
        self.R = R
        self.O = [o.context for o in O]
        self.names: Dict[Term, str] = {}
        for k, c in enumerate(self.O):
            self.names[c] = ID if c == SQUARE else f"O{k}"
        self.prods: List[Production] = []

    def nt(self, c: Term) -> str:
        return self.names[c]

    def arity(self, c: Term) -> int:
        return hole_count(c) + 1

    def add(self, head: str, left: Sequence[Term], right: Term, comment: str) -> None:
        self.prods.append(Production(head, tuple(left) + (right,), comment))

    def copy_rules(self) -> None:
        for f, n in self.R.alphabet.symbols:
            a = tuple(inst(ID, i, 1) for i in range(1, n + 1))
            b = tuple(inst(ID, i, 2) for i in range(1, n + 1))
            self.add(ID, [App(f, a)], App(f, b), f"copy {f}")
            self.prods.append(Production(ANY, (App(f, tuple(inst(ANY, i, 1) for i in range(1, n + 1))),), f"any {f}"))

    def refinements(self) -> None:
        # ⟨t⟩ -> u[π1⟨t[u]⟩] × π2⟨t[u]⟩
        for t in self.O:
            for t2 in self.O:
                if t2 == t:
                    continue
                u = prefix_args(t, t2)
                if u is None:
                    continue
                m = hole_count(t2)
                sigma = {f"{HOLE}{k}": inst(self.nt(t2), 1, k) for k in range(1, m + 1)}
                left = [substitute(ui, sigma) for ui in u]
                self.add(self.nt(t), left, inst(self.nt(t2), 1, m + 1), f"refine {format_term(t)} to {format_term(t2)}")

    def compositions(self) -> None:
        # ⟨t[u]⟩ -> π1⟨u1⟩ … π1⟨ul⟩ × t[π2⟨u1⟩ … π2⟨ul⟩]
        for t in self.O:
            if t == SQUARE:
                continue
            for t2 in self.O:
                u = prefix_args(t, t2)
                if u is None:
                    continue
                ctxs = [to_context(ui)[0] for ui in u]
                if any(c not in self.names for c in ctxs):
                    continue
                counters: Dict[str, int] = {}
                left: List[Term] = []
                tops: List[Term] = []
                for c in ctxs:
                    name = self.nt(c)
                    counters[name] = counters.get(name, 0) + 1
                    i = counters[name]
                    left.extend(inst(name, i, j) for j in range(1, hole_count(c) + 1))
                    tops.append(inst(name, i, hole_count(c) + 1))
                right = substitute(t, {f"{HOLE}{k}": v for k, v in enumerate(tops, 1)})
                self.add(self.nt(t2), left, right, f"compose {format_term(t)} over {', '.join(map(format_term, ctxs))}")

    def rule_productions(self) -> None:
        for k, rule in enumerate(self.R.rules, 1):
            t = maximal_prefix(self.O, rule.lhs)
            u = prefix_args(t, rule.lhs)
            s, v = rhs_cover(self.O, rule.rhs)
            counters: Dict[str, int] = {}
            sigma: Dict[str, Term] = {}
            tops: List[Term] = []
            for vi in v:
                c, names = to_context(vi)
                name = self.nt(c)
                counters[name] = counters.get(name, 0) + 1
                i = counters[name]
                for j, x in enumerate(names, 1):
                    sigma[x] = inst(name, i, j)
                tops.append(inst(name, i, hole_count(c) + 1))
            any_count = 0
            for ui in u:
                for x in variables(ui):
                    if x not in sigma:
                        any_count += 1
                        sigma[x] = inst(ANY, any_count, 1)
            left = [substitute(ui, sigma) for ui in u]
            right = substitute(s, {f"{HOLE}{j}": w for j, w in enumerate(tops, 1)})
            self.add(self.nt(t), left, right, f"rule {k}: {rule}")

    def grammar(self) -> TupleGrammar:
        self.copy_rules()
        self.refinements()
        self.compositions()
        self.rule_productions()
        nts = [NonTerminal(ANY, 1, (1, 0))]
        comments = [(ANY, "⟨*⟩: every ground tree")]
        for c in self.O:
            n = hole_count(c)
            nts.append(NonTerminal(self.nt(c), n + 1, (n, 1)))
            comments.append((self.nt(c), f"⟨{format_term(c)}⟩"))
        seen = set()
        prods = []
        for p in self.prods:
            if (p.head, p.body) not in seen:
                seen.add((p.head, p.body))
                prods.append(p)
        return check(TupleGrammar(tuple(nts), tuple(prods), ID, self.R.alphabet, tuple(comments)))


def build_grammar(R: Trs, check_class: bool = True) -> TupleGrammar:
    """Tuple grammar generating exactly the pairs (s, t) with s ->*_R t."""
    if check_class:
        require(R)
    return _Builder(R, overlap_set(R, check_class=False)).grammar()


def build_bottomup(R: Trs) -> TupleGrammar:
    require(R, BOTTOMUP)
    return swap_projections(build_grammar(R.inverse(), check_class=False))


def image_automaton(R: Trs, A: TreeAutomaton, G: Optional[TupleGrammar] = None) -> TreeAutomaton:
    """Automaton for ->*_R(L(A)) when R is linear and top-down."""
    G = build_grammar(R) if G is None else G
    product, axioms = synchronize(G, A, side=1, max_nonterminals=_cap())
    return project_split(product, 2, axioms, R.alphabet)


def inverse_image_automaton(R: Trs, A: TreeAutomaton) -> TreeAutomaton:
    """Automaton for the terms rewriting into L(A); R must be bottom-up."""
    G = build_bottomup(R)
    product, axioms = synchronize(G, A, side=2, max_nonterminals=_cap())
    return project_split(product, 1, axioms, R.alphabet)


def refuse_inverse_image(R: Trs) -> None:
    """Top-down inverse images are not recognizable in general."""
    report = classify(R)
    if BOTTOMUP not in report:
        raise ClassVeto("inverse images under a top-down system need not be recognizable; "
                        "use bounded preimage enumeration instead", report.witnesses.get(BOTTOMUP))


def bounded_preimages(R: Trs, targets: Sequence[Term], max_size: int,
                      G: Optional[TupleGrammar] = None) -> Set[Term]:
    """Every s of size ≤ max_size with s ->* t for some listed t."""
    G = build_grammar(R) if G is None else G
    A = finite_automaton(R.alphabet, targets, prefix="t")
    product, axioms = synchronize(G, A, side=2, max_nonterminals=_cap())
    bound = max_size + max(size(t) for t in targets)
    out: Set[Term] = set()
    for ax in axioms:
        for s, _ in enumerate_tuples(product, ax, bound, max_component=max(bound - 1, 1)):
            if size(s) <= max_size:
                out.add(s)
    return out


def _cap() -> int:
    return int(os.environ.get("RATRW_MAX_NONTERMINALS", "20000"))
