"""Tuple grammars: hyperedge-replacement grammars over tuples of trees.

A production body is a term word whose leaves may be instance variables
``B#i.j`` (component j of the i-th instance of non-terminal B).  A
non-terminal with a split ``(p, q)`` is read as a binary relation: its
first p components form the first projection, the last q the second.
"""

from __future__ import annotations

import itertools
import random
import re
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Set, Tuple

from .automata import TreeAutomaton, run_forest, trim
from .terms import (
    App,
    RankedAlphabet,
    Term,
    TermError,
    TermWord,
    Var,
    _compositions,
    format_term,
    match,
    parse_term,
    size,
    strip_comment,
    substitute,
    symbols,
    variables,
    word_size,
    word_sort_key,
)

_INST = re.compile(r"^(?P<nt>[^\s#(),|]+)#(?P<i>\d+)\.(?P<j>\d+)$")


def inst(nt: str, i: int, j: int) -> Var:
    return Var(f"{nt}#{i}.{j}")


def parse_inst(name: str) -> Optional[Tuple[str, int, int]]:
    m = _INST.match(name)
    if m is None:
        return None
    return m.group("nt"), int(m.group("i")), int(m.group("j"))


@dataclass(frozen=True)
class NonTerminal:
    name: str
    arity: int
    split: Optional[Tuple[int, int]] = None

    def __post_init__(self):
        if "#" in self.name or not self.name:
            raise TermError(f"bad non-terminal name {self.name!r}")
        if self.arity < 1:
            raise TermError(f"non-terminal {self.name} must have arity >= 1")
        if self.split is not None and sum(self.split) != self.arity:
            raise TermError(f"split {self.split} of {self.name} does not add up to {self.arity}")

    def side(self, k: int) -> range:
        """1-based component indices of projection k (1 or 2)."""
        if self.split is None:
            raise TermError(f"non-terminal {self.name} has no split")
        p, _ = self.split
        return range(1, p + 1) if k == 1 else range(p + 1, self.arity + 1)


@dataclass(frozen=True)
class Production:
    head: str
    body: TermWord
    comment: str = field(default="", compare=False)

    def instance_vars(self) -> List[Tuple[str, int, int]]:
        out = []
        for t in self.body:
            for v in variables(t):
                parsed = parse_inst(v)
                if parsed is not None:
                    out.append(parsed)
        return out

    def instances(self) -> Dict[Tuple[str, int], List[int]]:
        groups: Dict[Tuple[str, int], List[int]] = {}
        for nt, i, j in self.instance_vars():
            groups.setdefault((nt, i), []).append(j)
        return groups

    def terminal_count(self) -> int:
        return sum(1 for t in self.body for _ in symbols(t))


@dataclass(frozen=True)
class TupleGrammar:
    nonterminals: Tuple[NonTerminal, ...]
    productions: Tuple[Production, ...]
    axiom: str
    alphabet: Optional[RankedAlphabet] = None
    comments: Tuple[Tuple[str, str], ...] = ()

    @property
    def nts(self) -> Dict[str, NonTerminal]:
        return {n.name: n for n in self.nonterminals}

    def productions_of(self, name: str) -> List[Production]:
        return [p for p in self.productions if p.head == name]

    def with_axiom(self, axiom: str) -> "TupleGrammar":
        return TupleGrammar(self.nonterminals, self.productions, axiom, self.alphabet, self.comments)


def validate(G: TupleGrammar) -> List[str]:
    """Structured violations; an empty list means the grammar is well formed."""
    errors: List[str] = []
    nts = G.nts
    if len(nts) != len(G.nonterminals):
        errors.append("duplicate non-terminal names")
    if G.axiom not in nts:
        errors.append(f"axiom {G.axiom} is not declared")
    arities = G.alphabet.arities if G.alphabet is not None else None
    for k, prod in enumerate(G.productions, 1):
        where = f"production {k} ({prod.head})"
        head = nts.get(prod.head)
        if head is None:
            errors.append(f"{where}: undeclared head")
            continue
        if len(prod.body) != head.arity:
            errors.append(f"{where}: body has {len(prod.body)} components, arity is {head.arity}")
        seen: Set[str] = set()
        for t in prod.body:
            for v in variables(t):
                if v in seen:
                    errors.append(f"{where}: instance variable {v} occurs twice")
                seen.add(v)
                parsed = parse_inst(v)
                if parsed is None:
                    errors.append(f"{where}: {v} is not an instance variable")
                    continue
                nt, _, j = parsed
                if nt not in nts:
                    errors.append(f"{where}: {v} refers to undeclared {nt}")
                elif not 1 <= j <= nts[nt].arity:
                    errors.append(f"{where}: component {j} out of range for {nt}/{nts[nt].arity}")
            if arities is not None:
                for f, n in symbols(t):
                    if arities.get(f) != n:
                        errors.append(f"{where}: symbol {f}/{n} not in the alphabet")
        for (nt, i), js in prod.instances().items():
            if nt in nts and sorted(set(js)) != list(range(1, nts[nt].arity + 1)):
                missing = sorted(set(range(1, nts[nt].arity + 1)) - set(js))
                errors.append(f"{where}: instance {nt}#{i} misses components {missing}")
    return errors


def check(G: TupleGrammar) -> TupleGrammar:
    errors = validate(G)
    if errors:
        raise TermError("invalid grammar: " + "; ".join(errors[:5]))
    return G


# ---------------------------------------------------------------------------
# enumeration

class _Compiled:
    __slots__ = ("head", "body", "terminals", "instances", "eps", "consts", "feeds")

    def __init__(self, prod: Production, nts: Dict[str, NonTerminal]):
        self.head = prod.head
        self.body = prod.body
        self.terminals = prod.terminal_count()
        groups = prod.instances()
        # (nt, [var names by component])
        self.instances = [
            (nt, [f"{nt}#{i}.{j}" for j in range(1, nts[nt].arity + 1)]) for (nt, i) in sorted(groups)
        ]
        self.eps = self.terminals == 0 and len(self.instances) == 1
        # component j has size consts[j] + sum of the instance components in feeds[j]
        where = {name: (k, j) for k, (_, names) in enumerate(self.instances) for j, name in enumerate(names)}
        self.consts = [sum(1 for _ in symbols(t)) for t in self.body]
        self.feeds = [[where[v] for v in variables(t)] for t in self.body]

    def sizes(self, vecs: Sequence[Tuple[int, ...]]) -> Tuple[int, ...]:
        return tuple(c + sum(vecs[k][j] for k, j in feed) for c, feed in zip(self.consts, self.feeds))

    def build(self, chosen: Sequence[TermWord]) -> TermWord:
        sigma = {}
        for (_, names), word in zip(self.instances, chosen):
            sigma.update(zip(names, word))
        return tuple(substitute(t, sigma) for t in self.body)


def enumerate_tuples(G: TupleGrammar, axiom: Optional[str] = None, max_size: int = 10,
                     max_component: Optional[int] = None) -> Set[TermWord]:
    """All ground tuples derivable from ``axiom`` with total size ≤ max_size.

    ``max_component`` additionally bounds every component; it prunes
    intermediate tuples too, since each instance component ends up as a
    subterm of a final component.
    """
    axiom = G.axiom if axiom is None else axiom
    table = enumerate_all(G, max_size, max_component, roots=[axiom])
    out: Set[TermWord] = set()
    for layer in table.get(axiom, []):
        out |= layer
    return out


def reachable_nonterminals(G: TupleGrammar, roots: Iterable[str]) -> Set[str]:
    deps: Dict[str, Set[str]] = defaultdict(set)
    for p in G.productions:
        deps[p.head] |= {nt for nt, _ in p.instances()}
    seen: Set[str] = set()
    todo = list(roots)
    while todo:
        n = todo.pop()
        if n not in seen:
            seen.add(n)
            todo.extend(deps[n])
    return seen


def enumerate_all(G: TupleGrammar, max_size: int, max_component: Optional[int] = None,
                  roots: Optional[Iterable[str]] = None) -> Dict[str, List[Set[TermWord]]]:
    """Size-layered table of every non-terminal (or only those ``roots`` need).

    Tuples are bucketed by their vector of component sizes, so a candidate
    combination is rejected before any term is built.
    """
    nts = G.nts
    wanted = set(nts) if roots is None else reachable_nonterminals(G, roots)
    compiled = [_Compiled(p, nts) for p in G.productions if p.head in wanted]
    cap = max_size if max_component is None else max_component
    limits = _usage_limits(nts, compiled, wanted, set(wanted if roots is None else roots), max_size, cap)
    # buckets[nt][total] -> {size vector: set of words}
    buckets: Dict[str, List[Dict[Tuple[int, ...], Set[TermWord]]]] = {
        n: [dict() for _ in range(max_size + 1)] for n in wanted}
    eps_by_source: Dict[str, List[_Compiled]] = defaultdict(list)
    for c in compiled:
        if c.eps:
            eps_by_source[c.instances[0][0]].append(c)
    grounds = [c for c in compiled if not c.instances]
    rest = [c for c in compiled if c.instances and not c.eps]

    def add(nt: str, s: int, vec: Tuple[int, ...], word: TermWord, todo: list) -> None:
        if any(sum(vec[j] for j in group) > bound for group, bound in limits[nt]):
            return
        bucket = buckets[nt][s].setdefault(vec, set())
        if word not in bucket:
            bucket.add(word)
            todo.append((nt, vec, word))

    for s in range(1, max_size + 1):
        todo: List[Tuple[str, Tuple[int, ...], TermWord]] = []
        for c in grounds:
            vec = tuple(size(t) for t in c.body)
            if sum(vec) == s and max(vec, default=0) <= cap:
                add(c.head, s, vec, c.body, todo)
        for c in rest:
            budget = s - c.terminals
            k = len(c.instances)
            if budget < k:
                continue
            for parts in _compositions(budget, k):
                if any(part >= s for part in parts):
                    continue
                layers = [buckets[nt][part] for (nt, _), part in zip(c.instances, parts)]
                if any(not layer for layer in layers):
                    continue
                for vecs in itertools.product(*(layer.keys() for layer in layers)):
                    out = c.sizes(vecs)
                    if max(out) > cap:
                        continue
                    for chosen in itertools.product(*(layer[v] for layer, v in zip(layers, vecs))):
                        add(c.head, s, out, c.build(chosen), todo)
        while todo:
            src, vec, word = todo.pop()
            for c in eps_by_source.get(src, ()):
                add(c.head, s, c.sizes([vec]), c.build([word]), todo)
    table: Dict[str, List[Set[TermWord]]] = {}
    for n in wanted:
        table[n] = [set().union(*layer.values()) if layer else set() for layer in buckets[n]]
    return table


def _usage_limits(nts: Dict[str, NonTerminal], compiled: Sequence[_Compiled], wanted: Set[str],
                  roots: Set[str], max_size: int, cap: int) -> Dict[str, List[Tuple[Tuple[int, ...], int]]]:
    """Size budgets beyond which a tuple of a non-terminal can never be used.

    For every non-terminal we bound the total size of a few component groups
    (each component, each side of the split, everything).  A group's budget
    is the loosest one over all places the non-terminal is used, computed as
    a fixpoint from the budgets of the roots.
    """
    def groups(n: NonTerminal) -> List[Tuple[int, ...]]:
        out = [(j,) for j in range(n.arity)]
        if n.split is not None and 0 not in n.split and n.arity > 2:
            p = n.split[0]
            out += [tuple(range(p)), tuple(range(p, n.arity))]
        if n.arity > 1:
            out.append(tuple(range(n.arity)))
        return out

    cand = {n: groups(nts[n]) for n in wanted}
    none = -1
    bound: Dict[str, Dict[Tuple[int, ...], int]] = {n: {g: none for g in cand[n]} for n in wanted}
    for r in roots & wanted:
        for g in cand[r]:
            bound[r][g] = cap if len(g) == 1 else max_size
    uses = [(c, m) for c in compiled for m in range(len(c.instances))]
    changed = True
    while changed:
        changed = False
        for c, m in uses:
            head = bound[c.head]
            nt = c.instances[m][0]
            derived = []
            for hg, hb in head.items():
                if hb == none:
                    continue
                comps: Set[int] = set()
                other = 0
                for k in hg:
                    other += c.consts[k]
                    for inst_k, j in c.feeds[k]:
                        if inst_k == m:
                            comps.add(j)
                        else:
                            other += 1
                derived.append((comps, hb - other))
            if not derived:
                continue
            for g in cand[nt]:
                fits = [b for comps, b in derived if comps.issuperset(g)]
                b = min(fits) if fits else max_size
                b = min(b, cap if len(g) == 1 else max_size)
                if b > bound[nt][g]:
                    bound[nt][g] = b
                    changed = True
    return {n: [(g, b) for g, b in bound[n].items()] for n in wanted}


def enumerate_by_derivation(G: TupleGrammar, axiom: Optional[str] = None, max_size: int = 8,
                            order: str = "leftmost", seed: int = 0) -> Set[TermWord]:
    """Naive enumeration by rewriting sentential forms.

    Independent of :func:`enumerate_tuples`; used to cross-check it and to
    test that the choice of which instance to expand does not matter.
    """
    nts = G.nts
    axiom = G.axiom if axiom is None else axiom
    rng = random.Random(seed)
    start = tuple(inst(axiom, 1, j) for j in range(1, nts[axiom].arity + 1))
    by_head: Dict[str, List[Production]] = defaultdict(list)
    for p in G.productions:
        by_head[p.head].append(p)

    def weight(form: TermWord) -> int:
        # every instance component still has to produce at least one symbol
        return sum(1 for t in form for _ in _nodes(t))

    seen = {_canon_form(start)}
    todo = [start]
    out: Set[TermWord] = set()
    while todo:
        form = todo.pop()
        pending = []
        for t in form:
            for v in variables(t):
                parsed = parse_inst(v)
                if parsed and (parsed[0], parsed[1]) not in pending:
                    pending.append((parsed[0], parsed[1]))
        if not pending:
            out.add(form)
            continue
        nt, i = pending[0] if order == "leftmost" else rng.choice(pending)
        used = {(p[0], p[1]) for p in pending}
        for prod in by_head[nt]:
            renamed = _fresh_instances(prod, used)
            sigma = {f"{nt}#{i}.{j}": renamed[j - 1] for j in range(1, nts[nt].arity + 1)}
            new = tuple(substitute(t, sigma) for t in form)
            if weight(new) > max_size:
                continue
            key = _canon_form(new)
            if key not in seen:
                seen.add(key)
                todo.append(new)
    return out


def _nodes(t: Term) -> Iterator[Term]:
    yield t
    if isinstance(t, App):
        for a in t.args:
            yield from _nodes(a)


def _fresh_instances(prod: Production, used: Set[Tuple[str, int]]) -> TermWord:
    taken = set(used)
    ren: Dict[str, Term] = {}
    for (nt, i) in sorted(prod.instances()):
        k = 1
        while (nt, k) in taken:
            k += 1
        taken.add((nt, k))
        for j in prod.instances()[(nt, i)]:
            ren[f"{nt}#{i}.{j}"] = inst(nt, k, j)
    return tuple(substitute(t, ren) for t in prod.body)


def _canon_form(form: TermWord) -> TermWord:
    order: Dict[Tuple[str, int], int] = {}
    ren: Dict[str, Term] = {}
    counters: Dict[str, int] = defaultdict(int)
    for t in form:
        for v in variables(t):
            nt, i, j = parse_inst(v)
            if (nt, i) not in order:
                counters[nt] += 1
                order[(nt, i)] = counters[nt]
            ren[v] = inst(nt, order[(nt, i)], j)
    return tuple(substitute(t, ren) for t in form)


# ---------------------------------------------------------------------------
# membership

def contains_tuple(G: TupleGrammar, axiom: Optional[str], word: Sequence[Term]) -> bool:
    """Exact membership of a ground tuple in L(G, axiom)."""
    return Membership(G).contains(G.axiom if axiom is None else axiom, tuple(word))


class Membership:
    """Memoized goal decomposition.

    A goal is (non-terminal, target tuple).  Productions emitting a symbol or
    splitting into several instances reduce the total target size; the
    remaining single-instance, symbol-free productions only permute
    components, so they are handled by closing each goal under them first.
    """

    def __init__(self, G: TupleGrammar):
        self.G = G
        self.nts = G.nts
        compiled = [_Compiled(p, self.nts) for p in G.productions]
        self.by_head: Dict[str, List[_Compiled]] = defaultdict(list)
        for c in compiled:
            self.by_head[c.head].append(c)
        self.memo: Dict[Tuple[str, TermWord], bool] = {}

    def contains(self, nt: str, word: TermWord) -> bool:
        if nt not in self.nts or len(word) != self.nts[nt].arity:
            return False
        return self._solve((nt, tuple(word)))

    def _closure(self, goal):
        seen = {goal}
        todo = [goal]
        while todo:
            nt, word = todo.pop()
            for c in self.by_head[nt]:
                if not c.eps:
                    continue
                for sub in self._decompose(c, word):
                    g = sub[0]
                    if g not in seen:
                        seen.add(g)
                        todo.append(g)
        return seen

    def _solve(self, goal) -> bool:
        hit = self.memo.get(goal)
        if hit is not None:
            return hit
        closure = self._closure(goal)
        result = any(self._direct(g) for g in closure)
        for g in closure:
            if result:
                self.memo[g] = True
        self.memo[goal] = result
        return result

    def _direct(self, goal) -> bool:
        nt, word = goal
        for c in self.by_head[nt]:
            if c.eps:
                continue
            for subgoals in self._decompose(c, word):
                if all(self._solve(g) for g in subgoals):
                    return True
        return False

    def _decompose(self, c: _Compiled, word: TermWord):
        sigma: Optional[Dict[str, Term]] = {}
        for pattern, target in zip(c.body, word):
            sigma = match(pattern, target, sigma)
            if sigma is None:
                return
        yield [(nt, tuple(sigma[n] for n in names)) for nt, names in c.instances]


# ---------------------------------------------------------------------------
# transformations

def swap_projections(G: TupleGrammar) -> TupleGrammar:
    """Grammar of the inverse relation: second projection first."""
    new_index: Dict[str, Dict[int, int]] = {}
    nts = []
    for n in G.nonterminals:
        if n.split is None:
            raise TermError(f"non-terminal {n.name} has no split; cannot swap projections")
        p, q = n.split
        new_index[n.name] = {j: (q + j if j <= p else j - p) for j in range(1, n.arity + 1)}
        nts.append(NonTerminal(n.name, n.arity, (q, p)))
    prods = []
    for prod in G.productions:
        ren = {f"{nt}#{i}.{j}": inst(nt, i, new_index[nt][j]) for nt, i, j in prod.instance_vars()}
        body: List[Optional[Term]] = [None] * len(prod.body)
        for j, t in enumerate(prod.body, 1):
            body[new_index[prod.head][j] - 1] = substitute(t, ren)
        prods.append(Production(prod.head, tuple(body), prod.comment))
    return TupleGrammar(tuple(nts), tuple(prods), G.axiom, G.alphabet, G.comments)


def productive_nonterminals(G: TupleGrammar) -> Set[str]:
    prod: Set[str] = set()
    instances = [(p.head, {nt for nt, _ in p.instances()}) for p in G.productions]
    changed = True
    while changed:
        changed = False
        for head, needs in instances:
            if head not in prod and needs <= prod:
                prod.add(head)
                changed = True
    return prod


def _side_of(n: NonTerminal, j: int) -> int:
    return 1 if j <= n.split[0] else 2


def synchronize(G: TupleGrammar, A: TreeAutomaton, side: int = 1,
                max_nonterminals: int = 200_000) -> Tuple[TupleGrammar, List[str]]:
    """Product of ``G`` with ``A`` running over projection ``side``.

    Non-terminals become (N, states for N's side components); every
    production is kept for each partial run of ``A`` over its side
    components, the run's final control word labelling the instances.
    Returns the product grammar and its axioms (one per initial state).
    """
    nts = G.nts
    by_head: Dict[str, List[Production]] = defaultdict(list)
    for p in G.productions:
        by_head[p.head].append(p)
    axiom = nts[G.axiom]
    if len(axiom.side(side)) != 1:
        raise TermError("the synchronized projection of the axiom must be a single tree")
    names: Dict[Tuple[str, Tuple[str, ...]], str] = {}
    comments: List[Tuple[str, str]] = []
    todo: List[Tuple[str, Tuple[str, ...]]] = []

    def name_of(key) -> str:
        if key not in names:
            if len(names) >= max_nonterminals:
                raise TermError(f"product grammar exceeds {max_nonterminals} non-terminals")
            names[key] = f"{key[0]}_{len(names)}"
            comments.append((names[key], f"{key[0]} with states ({' '.join(key[1])})"))
            todo.append(key)
        return names[key]

    axioms = [name_of((G.axiom, (q,))) for q in sorted(A.initial)]
    prods: List[Production] = []
    while todo:
        key = todo.pop(0)
        head_name, states = key
        head = nts[head_name]
        idx = list(head.side(side))
        for prod in by_head[head_name]:
            side_body = [prod.body[j - 1] for j in idx]
            for v in (v for t in side_body for v in variables(t)):
                nt, _, j = parse_inst(v)
                if _side_of(nts[nt], j) != side:
                    raise TermError(f"production of {head_name} mixes projections: {v} on side {side}")
            groups = prod.instances()
            for run in run_forest(A, states, side_body):
                ren: Dict[str, Term] = {}
                counters: Dict[str, int] = defaultdict(int)
                for (nt, i) in sorted(groups):
                    n = nts[nt]
                    sub_states = tuple(run[f"{nt}#{i}.{j}"] for j in n.side(side))
                    new_name = name_of((nt, sub_states))
                    counters[new_name] += 1
                    for j in range(1, n.arity + 1):
                        ren[f"{nt}#{i}.{j}"] = inst(new_name, counters[new_name], j)
                body = tuple(substitute(t, ren) for t in prod.body)
                prods.append(Production(names[key], body))
    new_nts = tuple(NonTerminal(names[k], nts[k[0]].arity, nts[k[0]].split) for k in names)
    product = TupleGrammar(new_nts, tuple(prods), axioms[0] if axioms else G.axiom, G.alphabet, tuple(comments))
    return product, axioms


def project_split(G: TupleGrammar, side: int, axioms: Optional[Sequence[str]] = None,
                  alphabet: Optional[RankedAlphabet] = None) -> TreeAutomaton:
    """Top-down automaton for projection ``side``, one state per non-terminal component.

    Components of one instance are treated as independent unary pieces, which
    is exact when the caller's construction guarantees it (e.g. a single
    component per non-terminal on that side).
    """
    nts = G.nts
    alphabet = alphabet or G.alphabet
    if alphabet is None:
        raise TermError("project_split needs an alphabet")
    axioms = [G.axiom] if axioms is None else list(axioms)
    live = productive_nonterminals(G)
    rules: Set[Tuple[str, str, Tuple[str, ...]]] = set()
    eps: Dict[str, Set[str]] = defaultdict(set)
    fresh = itertools.count()

    def comp_state(nt: str, j: int) -> str:
        return f"{nt}.{j}"

    def compile_term(state: str, t: Term) -> None:
        if isinstance(t, Var):
            nt, _, j = parse_inst(t.name)
            eps[state].add(comp_state(nt, j))
            return
        children = []
        for a in t.args:
            if isinstance(a, Var):
                nt, _, j = parse_inst(a.name)
                children.append(comp_state(nt, j))
            else:
                child = f"_{next(fresh)}"
                compile_term(child, a)
                children.append(child)
        rules.add((state, t.sym, tuple(children)))

    for prod in G.productions:
        if prod.head not in live or any(nt not in live for nt, _ in prod.instances()):
            continue
        head = nts[prod.head]
        for j in head.side(side):
            t = prod.body[j - 1]
            for v in variables(t):
                nt, _, jj = parse_inst(v)
                if _side_of(nts[nt], jj) != side:
                    raise TermError(f"production of {prod.head} mixes projections: {v} on side {side}")
            compile_term(comp_state(prod.head, j), t)

    states = {r[0] for r in rules} | {q for r in rules for q in r[2]} | set(eps) | {q for s in eps.values() for q in s}
    closure: Dict[str, Set[str]] = {}
    for s in states:
        seen = {s}
        stack = [s]
        while stack:
            u = stack.pop()
            for w in eps.get(u, ()):
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        closure[s] = seen
    by_state: Dict[str, List[Tuple[str, Tuple[str, ...]]]] = defaultdict(list)
    for q, f, qs in rules:
        by_state[q].append((f, qs))
    full = {(s, f, qs) for s in states for u in closure[s] for f, qs in by_state.get(u, ())}
    initial = []
    for ax in axioms:
        n = nts[ax]
        comps = list(n.side(side))
        if len(comps) != 1:
            raise TermError(f"axiom {ax} has {len(comps)} components on side {side}")
        if ax in live:
            initial.append(comp_state(ax, comps[0]))
    A = TreeAutomaton.build(alphabet, initial, full, sorted(states | set(initial)))
    return trim(A)


# ---------------------------------------------------------------------------
# rational operations on explicit finite tuple languages

TupleLanguage = FrozenSet[TermWord]


def _base(name: str) -> Tuple[str, int]:
    base, sep, idx = name.partition("^")
    return (base, int(idx)) if sep else (base, 1)


def _instances_of(word: TermWord, x: Sequence[str]) -> Dict[int, Dict[str, str]]:
    found: Dict[int, Dict[str, str]] = defaultdict(dict)
    for v in (v for t in word for v in variables(t)):
        base, k = _base(v)
        if base in x:
            found[k][base] = v
    for k, comps in found.items():
        if set(comps) != set(x):
            raise TermError(f"instance {k} of {list(x)} is incomplete in {word}")
    return found


def subst_product(L: Iterable[TermWord], x: Sequence[str], M: Iterable[TermWord],
                  max_size: Optional[int] = None) -> TupleLanguage:
    """``L ·x M``: replace every instance of the variable word x by an element of M."""
    M = list(M)
    for m in M:
        if len(m) != len(x):
            raise TermError(f"tuple {m} has length {len(m)}, variable word has {len(x)}")
    out: Set[TermWord] = set()
    for t in L:
        found = _instances_of(t, x)
        keys = sorted(found)
        for choice in itertools.product(M, repeat=len(keys)):
            sigma: Dict[str, Term] = {}
            next_idx = itertools.count(1)
            for k, m in zip(keys, choice):
                shift = {}
                for v in (v for u in m for v in variables(u)):
                    base, kk = _base(v)
                    if base in x and kk not in shift:
                        shift[kk] = next(next_idx)
                ren = {v: Var(f"{_base(v)[0]}^{shift[_base(v)[1]]}") for u in m for v in variables(u) if _base(v)[0] in x}
                for j, name in enumerate(x):
                    sigma[found[k][name]] = substitute(m[j], ren)
            word = tuple(substitute(u, sigma) for u in t)
            word = _renumber(word, x)
            if max_size is None or word_size(word) <= max_size:
                out.add(word)
    return frozenset(out)


def _renumber(word: TermWord, x: Sequence[str]) -> TermWord:
    order: Dict[int, int] = {}
    for v in (v for t in word for v in variables(t)):
        base, k = _base(v)
        if base in x and k not in order:
            order[k] = len(order) + 1
    ren = {}
    for v in (v for t in word for v in variables(t)):
        base, k = _base(v)
        if base in x:
            ren[v] = Var(base if order[k] == 1 else f"{base}^{order[k]}")
    return tuple(substitute(t, ren) for t in word)


def iterate_subst(L: Iterable[TermWord], x: Sequence[str], max_size: int) -> TupleLanguage:
    """``L^{*x}`` truncated at ``max_size``; the zeroth power is the tuple x itself."""
    L = list(L)
    power: Set[TermWord] = {tuple(Var(v) for v in x)}
    total = set(power)
    while power:
        power = set(subst_product(L, x, power, max_size)) - total
        total |= power
    return frozenset(total)


# ---------------------------------------------------------------------------
# file format

def _split_top(text: str, sep: str) -> List[str]:
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == sep and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return parts


def _parse_side(text: str, alphabet) -> List[Term]:
    text = text.strip()
    if not text:
        return []
    inst_names = {tok for tok in re.findall(r"[^\s(),|]+", text) if _INST.match(tok)}
    return [parse_term(piece.strip(), alphabet, inst_names) for piece in _split_top(text, ",")]


def parse_grammar(text: str, alphabet: Optional[RankedAlphabet] = None) -> TupleGrammar:
    nts: List[NonTerminal] = []
    raw: List[Tuple[int, str, str]] = []
    axiom = None
    for lineno, line in enumerate(text.splitlines(), 1):
        line = strip_comment(line)
        if not line:
            continue
        key, _, rest = line.partition(":")
        key = key.strip()
        if key == "alphabet":
            declared = RankedAlphabet.of(rest)
            alphabet = declared if alphabet is None else alphabet.union(declared)
        elif key == "nonterminal":
            parts = rest.split()
            name, _, ar = parts[0].partition("/")
            split = None
            if len(parts) == 4 and parts[1] == "split":
                split = (int(parts[2]), int(parts[3]))
            elif len(parts) != 1:
                raise TermError(f"line {lineno}: expected 'nonterminal: N/n [split p q]'")
            nts.append(NonTerminal(name, int(ar), split))
        elif key == "axiom":
            axiom = rest.strip()
        elif key == "prod":
            head, arrow, body = rest.partition("->")
            if not arrow:
                raise TermError(f"line {lineno}: expected 'prod: N -> body'")
            raw.append((lineno, head.strip(), body))
        else:
            raise TermError(f"line {lineno}: unknown key {key!r}")
    table = {n.name: n for n in nts}
    prods = []
    for lineno, head, body in raw:
        n = table.get(head)
        if n is None:
            raise TermError(f"line {lineno}: undeclared non-terminal {head}")
        try:
            if n.split is not None:
                left, bar, right = body.partition("|")
                if not bar:
                    raise TermError("split non-terminal needs '|' between projections")
                word = _parse_side(left, alphabet) + _parse_side(right, alphabet)
            else:
                word = _parse_side(body, alphabet)
        except TermError as exc:
            raise TermError(f"line {lineno}: {exc}") from exc
        prods.append(Production(head, tuple(word)))
    if axiom is None:
        axiom = nts[0].name if nts else ""
    return check(TupleGrammar(tuple(nts), tuple(prods), axiom, alphabet))


def format_grammar(G: TupleGrammar) -> str:
    lines = []
    if G.alphabet is not None:
        lines.append(f"alphabet: {G.alphabet}")
    notes = dict(G.comments)
    for n in G.nonterminals:
        split = f" split {n.split[0]} {n.split[1]}" if n.split is not None else ""
        note = f"  # {notes[n.name]}" if n.name in notes else ""
        lines.append(f"nonterminal: {n.name}/{n.arity}{split}{note}")
    lines.append(f"axiom: {G.axiom}")
    nts = G.nts
    for p in G.productions:
        n = nts[p.head]
        if n.split is not None:
            k = n.split[0]
            left = ", ".join(format_term(t) for t in p.body[:k])
            right = ", ".join(format_term(t) for t in p.body[k:])
            body = f"{left} | {right}".strip()
        else:
            body = ", ".join(format_term(t) for t in p.body)
        lines.append(f"prod: {p.head} -> {body}")
    return "\n".join(lines) + "\n"


def sorted_tuples(ws: Iterable[TermWord]) -> List[TermWord]:
    return sorted(ws, key=word_sort_key)
