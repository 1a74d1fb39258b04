"""Derivation grammars for linear suffix systems.

Each rule is compiled into automaton runs over an extended alphabet of
control states: lhs states *consume* an input prefix bottom-up
(``f(p1(x1), …, pn(xn)) -> p(x1 … xn)``), rhs states *produce* the output
top-down (``q(y) -> f(q1(y1), …)``), and a bridge links the two roots.  A
state applied to its variable word is a *state term*; a state's variable
word is the left-to-right list of rule variables below its position.

Saturation then computes the bridging relation ``eq`` between state terms,
after which a derivation is a consumption phase followed by a production
phase.  The grammar tracks, for each group of state terms linked by shared
variables, the pieces of input consumed into them and of output produced
from them; variable leaves restart a fresh derivation.
"""

from __future__ import annotations

import itertools
import os
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

from .automata import TreeAutomaton
from .classifier import SUFFIX, classify
from .grammars import NonTerminal, Production, TupleGrammar, check, inst, project_split, synchronize
from .rewriting import RewriteRule, Trs, UnsupportedSystem, explore, suffix_step
from .topdown import ClassVeto
from .terms import App, RankedAlphabet, Term, TermError, Var, format_term, positions, size, subterm_at, variables

Consume = Tuple[str, Tuple[str, ...], str]      # (f, children, target); f may be a variable label
Produce = Tuple[str, str, Tuple[str, ...]]      # (source, f, children)
Link = Tuple[str, str, Tuple[int, ...]]         # p(x1..xn) -> q(x_i1 .. x_im)


@dataclass(frozen=True)
class StateInfo:
    name: str
    nu: Tuple[str, ...]
    origin: str

    @property
    def arity(self) -> int:
        return len(self.nu)


@dataclass(frozen=True)
class StateSystem:
    alphabet: RankedAlphabet
    states: Tuple[StateInfo, ...]
    consume: Tuple[Consume, ...]
    produce: Tuple[Produce, ...]
    bridges: Tuple[Link, ...]

    @property
    def info(self) -> Dict[str, StateInfo]:
        return {s.name: s for s in self.states}

    def arity(self, state: str) -> int:
        return self.info[state].arity

    def extended_alphabet(self) -> RankedAlphabet:
        return RankedAlphabet(self.alphabet.symbols + tuple((s.name, s.arity) for s in self.states))

    def state_term(self, state: str, args: Optional[Sequence[str]] = None) -> Term:
        nu = self.info[state].nu if args is None else tuple(args)
        return App(state, tuple(Var(x) for x in nu))

    def rules(self) -> List[RewriteRule]:
        """R′ as ordinary rewrite rules over the extended alphabet."""
        return consume_rules(self) + produce_rules(self) + [link_rule(self, l) for l in self.bridges]

    def as_trs(self) -> Trs:
        rules = tuple(dict.fromkeys(self.rules()))
        return Trs(self.extended_alphabet(), rules, (), _rule_vars(rules))


def _rule_vars(rules: Iterable[RewriteRule]) -> Tuple[str, ...]:
    names: Dict[str, None] = {}
    for r in rules:
        for v in variables(r.lhs):
            names.setdefault(v)
    return tuple(names)


def consume_rules(S: StateSystem) -> List[RewriteRule]:
    out = []
    for f, children, target in S.consume:
        if f in S.alphabet:
            lhs = App(f, tuple(S.state_term(c) for c in children))
        else:
            lhs = Var(f)
        out.append(RewriteRule(lhs, S.state_term(target)))
    return out


def produce_rules(S: StateSystem) -> List[RewriteRule]:
    out = []
    for source, f, children in S.produce:
        if f in S.alphabet:
            rhs = App(f, tuple(S.state_term(c) for c in children))
        else:
            rhs = Var(f)
        out.append(RewriteRule(S.state_term(source), rhs))
    return out


def link_rule(S: StateSystem, link: Link) -> RewriteRule:
    p, q, idx = link
    xs = [f"x{i}" for i in range(1, S.arity(p) + 1)]
    return RewriteRule(S.state_term(p, xs), S.state_term(q, [xs[i] for i in idx]))


# ---------------------------------------------------------------------------
# R′

def _pos(p: Tuple[int, ...]) -> str:
    return ".".join(map(str, p)) if p else "e"


def _term_states(t: Term, prefix: str, origin: str):
    """One state per node of a linear term: consuming and producing shapes."""
    infos, cons, prods = [], [], []
    for p in positions(t):
        sub = subterm_at(t, p)
        name = f"{prefix}.{_pos(p)}"
        infos.append(StateInfo(name, tuple(variables(sub)), origin))
        if isinstance(sub, Var):
            cons.append((sub.name, (), name))
            prods.append((name, sub.name, ()))
        else:
            kids = tuple(f"{prefix}.{_pos(p + (i,))}" for i in range(1, len(sub.args) + 1))
            cons.append((sub.sym, kids, name))
            prods.append((name, sub.sym, kids))
    return infos, cons, prods


def _automaton_states(A: TreeAutomaton, side: str, k: int, var_names: Set[str]):
    prefix = f"{side}{k}"
    nu: Dict[str, Tuple[str, ...]] = {}
    # variables are declared as nullary symbols of the extended alphabet
    changed = True
    while changed:
        changed = False
        for q, f, qs in sorted(A.rules):
            if any(c not in nu for c in qs):
                continue
            word = (f,) if f in var_names else tuple(x for c in qs for x in nu[c])
            if len(set(word)) != len(word):
                raise TermError(f"state {prefix}.{q}: non-linear variable boundary {' '.join(word)}")
            if q in nu and nu[q] != word:
                raise TermError(f"state {prefix}.{q} has two variable boundaries: "
                                f"{' '.join(nu[q]) or 'ε'} and {' '.join(word) or 'ε'}")
            if q not in nu:
                nu[q] = word
                changed = True
    name = {q: f"{prefix}.{q}" for q in nu}
    infos = [StateInfo(name[q], nu[q], f"automaton rule {k}") for q in A.states if q in nu]
    cons, prods = [], []
    for q, f, qs in sorted(A.rules):
        if q not in nu or any(c not in nu for c in qs):
            continue
        kids = tuple(name[c] for c in qs)
        cons.append((f, kids, name[q]))
        prods.append((name[q], f, kids))
    roots = [name[q] for q in sorted(A.initial) if q in nu]
    return infos, cons, prods, roots, nu


def _bridge(p: StateInfo, q: StateInfo) -> Link:
    missing = set(q.nu) - set(p.nu)
    if missing:
        raise TermError(f"bridge {p.name} -> {q.name}: variables {sorted(missing)} are not consumed")
    return (p.name, q.name, tuple(p.nu.index(x) for x in q.nu))


def to_state_system(R: Trs) -> StateSystem:
    if not R.linear:
        raise UnsupportedSystem("the suffix construction needs a linear system")
    infos: List[StateInfo] = []
    cons: List[Consume] = []
    prods: List[Produce] = []
    bridges: List[Link] = []
    for k, rule in enumerate(R.rules, 1):
        li, lc, _ = _term_states(rule.lhs, f"l{k}", f"rule {k} lhs")
        ri, _, rp = _term_states(rule.rhs, f"r{k}", f"rule {k} rhs")
        infos += li + ri
        cons += lc
        prods += rp
        bridges.append(_bridge(li[0], ri[0]))
    var_names = set(R.vars)
    for k, pair in enumerate(R.recognizable, len(R.rules) + 1):
        li, lc, _, lroots, _ = _automaton_states(pair.source, "l", k, var_names)
        ri, _, rp, rroots, _ = _automaton_states(pair.target, "r", k, var_names)
        infos += li + ri
        cons += lc
        prods += rp
        table = {s.name: s for s in li + ri}
        for p0 in lroots:
            for q0 in rroots:
                bridges.append(_bridge(table[p0], table[q0]))
    names = [s.name for s in infos]
    clash = (set(names) & set(R.alphabet.arities)) or len(set(names)) != len(names)
    if clash:
        raise TermError(f"state names clash with the alphabet or each other: {clash}")
    return StateSystem(R.alphabet, tuple(infos), tuple(cons), tuple(prods), tuple(bridges))


# ---------------------------------------------------------------------------
# saturation

@dataclass(frozen=True)
class SaturationTriple:
    """``produce`` is R₋, ``eq`` is R₌ and ``consume`` is R₊."""

    system: StateSystem
    eq: FrozenSet[Link]

    @property
    def var_consumers(self) -> Set[str]:
        return {t for f, kids, t in self.system.consume if f not in self.system.alphabet}

    @property
    def var_producers(self) -> Set[str]:
        return {s for s, f, kids in self.system.produce if f not in self.system.alphabet}

    def eq_rules(self) -> List[RewriteRule]:
        return [link_rule(self.system, l) for l in sorted(self.eq)]

    def consume_trs(self) -> Trs:
        rules = tuple(dict.fromkeys(consume_rules(self.system) + self.eq_rules()))
        return Trs(self.system.extended_alphabet(), rules, (), _rule_vars(rules))

    def produce_trs(self) -> Trs:
        rules = tuple(dict.fromkeys(produce_rules(self.system) + self.eq_rules()))
        return Trs(self.system.extended_alphabet(), rules, (), _rule_vars(rules))

    def format(self) -> str:
        S = self.system
        lines = [f"alphabet: {S.extended_alphabet()}",
                 f"states: {' '.join(s.name for s in S.states)}"]
        vs = _rule_vars(consume_rules(S) + produce_rules(S) + self.eq_rules())
        lines.append(f"vars: {' '.join(vs)}")
        for tag, rules in (("R-", produce_rules(S)), ("R=", self.eq_rules()), ("R+", consume_rules(S))):
            lines.append(f"# {tag}")
            lines.extend(f"rule: {r}" for r in rules)
        return "\n".join(lines) + "\n"


def saturate(S: StateSystem) -> SaturationTriple:
    """Least relation closed under reflexivity, bridges, transitivity and cancellation."""
    info = S.info
    eq: Set[Link] = {(s.name, s.name, tuple(range(s.arity))) for s in S.states}
    eq |= set(S.bridges)
    def key(f: str, n: int) -> Tuple[Optional[str], int]:
        # a variable leaf is consumed whatever its name
        return (f if f in S.alphabet else None, n)

    consume_by_sym: Dict[Tuple[Optional[str], int], List[Consume]] = defaultdict(list)
    for c in S.consume:
        consume_by_sym[key(c[0], len(c[1]))].append(c)
    changed = True
    while changed:
        changed = False
        new: Set[Link] = set()
        by_src: Dict[str, List[Link]] = defaultdict(list)
        for l in eq:
            by_src[l[0]].append(l)
        for p, q, i1 in eq:
            for _, r, i2 in by_src[q]:
                new.add((p, r, tuple(i1[j] for j in i2)))
        pairs = defaultdict(list)
        for p, q, idx in eq:
            pairs[p].append((q, idx))
        for src, f, kids in S.produce:
            offsets = list(itertools.accumulate([0] + [info[k].arity for k in kids]))
            for _, ckids, dst in consume_by_sym[key(f, len(kids))]:
                if f not in S.alphabet:
                    # variable leaf produced and consumed again
                    new.add((src, dst, (0,)))
                    continue
                options = [[idx for q, idx in pairs[k] if q == ck] for k, ck in zip(kids, ckids)]
                for combo in itertools.product(*options):
                    idx = tuple(offsets[i] + j for i, part in enumerate(combo) for j in part)
                    if len(idx) == info[dst].arity:
                        new.add((src, dst, idx))
        if not new <= eq:
            eq |= new
            changed = True
    return SaturationTriple(S, frozenset(eq))


# ---------------------------------------------------------------------------
# bounded checks of the two-phase decomposition

def two_phase_reachable(T: SaturationTriple, s: Term, max_size: int) -> Set[Term]:
    """Terms over F ∪ X reached by consuming then producing (suffix steps)."""
    cons, prod = T.consume_trs(), T.produce_trs()
    middle = explore(cons, s, None, max_size, step=suffix_step)
    out: Set[Term] = set()
    alphabet = T.system.alphabet
    for m in middle:
        for t in explore(prod, m, None, max_size, step=suffix_step):
            if _over(t, alphabet):
                out.add(t)
    return out


def _over(t: Term, alphabet: RankedAlphabet) -> bool:
    if isinstance(t, Var):
        return True
    return t.sym in alphabet and all(_over(a, alphabet) for a in t.args)


def bridge_violations(T: SaturationTriple, max_size: int = 6) -> List[Tuple[Term, Term, Term]]:
    """Chains ``pu =>* t =>* qv`` (produce then consume) not covered by ``eq``."""
    cons, prod = T.consume_trs(), T.produce_trs()
    bad = []
    states = {s.name for s in T.system.states}
    for info in T.system.states:
        start = T.system.state_term(info.name, [f"x{i}" for i in range(1, info.arity + 1)])
        for t in explore(prod, start, None, max_size, step=suffix_step):
            for u in explore(cons, t, None, max_size + info.arity, step=suffix_step):
                if isinstance(u, App) and u.sym in states and all(isinstance(a, Var) for a in u.args):
                    names = [a.name for a in start.args]
                    if not all(a.name in names for a in u.args):
                        continue
                    link = (info.name, u.sym, tuple(names.index(a.name) for a in u.args))
                    if link not in T.eq:
                        bad.append((start, t, u))
    return bad


# ---------------------------------------------------------------------------
# the grammar

START, ANY = "I", "I'"


def _cap() -> int:
    return int(os.environ.get("RATRW_MAX_NONTERMINALS", "20000"))


class _SuffixGrammar:
    def __init__(self, T: SaturationTriple, cap: int):
        self.T = T
        self.S = T.system
        self.info = self.S.info
        self.cap = cap
        self.alphabet = self.S.alphabet
        self.eq_by_dst: Dict[str, List[Link]] = defaultdict(list)
        self.eq_by_src: Dict[str, List[Link]] = defaultdict(list)
        for l in sorted(T.eq):
            if l[0] == l[1] and l[2] == tuple(range(len(l[2]))):
                continue
            self.eq_by_src[l[0]].append(l)
            self.eq_by_dst[l[1]].append(l)
        self.consume_into: Dict[str, List[Consume]] = defaultdict(list)
        for c in self.S.consume:
            if c[0] in self.alphabet:
                self.consume_into[c[2]].append(c)
        self.produce_from: Dict[str, List[Produce]] = defaultdict(list)
        for p in self.S.produce:
            if p[1] in self.alphabet:
                self.produce_from[p[0]].append(p)
        self.var_consumers = T.var_consumers
        self.var_producers = T.var_producers
        self.names: Dict[Tuple[Tuple[Term, ...], Tuple[Term, ...]], str] = {}
        self.todo: List[Tuple[Tuple[Term, ...], Tuple[Term, ...]]] = []
        self.prods: List[Production] = []

    # configurations -------------------------------------------------------

    def _groups(self, U: Sequence[Term], V: Sequence[Term]):
        items = [("u", i, t) for i, t in enumerate(U)] + [("v", i, t) for i, t in enumerate(V)]
        parent = list(range(len(items)))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        owner: Dict[str, int] = {}
        for k, (_, _, t) in enumerate(items):
            for v in variables(t):
                if v in owner:
                    parent[find(k)] = find(owner[v])
                else:
                    owner[v] = k
        groups: Dict[int, List[int]] = {}
        for k in range(len(items)):
            groups.setdefault(find(k), []).append(k)
        return [[items[k] for k in ks] for ks in sorted(groups.values())]

    def _canon(self, us: List[Term], vs: List[Term]):
        ren: Dict[str, Var] = {}
        for t in us + vs:
            for v in variables(t):
                ren.setdefault(v, Var(f"x{len(ren) + 1}"))
        fix = lambda t: App(t.sym, tuple(ren[a.name] for a in t.args))  # noqa: E731
        return tuple(fix(t) for t in us), tuple(fix(t) for t in vs)

    def name_of(self, key) -> str:
        if key not in self.names:
            if len(self.names) >= self.cap:
                raise TermError(f"suffix grammar exceeds {self.cap} non-terminals "
                                f"(set RATRW_MAX_NONTERMINALS to raise the cap)")
            self.names[key] = f"N{len(self.names) + 1}"
            self.todo.append(key)
        return self.names[key]

    def instantiate(self, U: Sequence[Term], V: Sequence[Term]):
        """Instance variables standing for every state term of ``U | V``."""
        u_out: List[Optional[Term]] = [None] * len(U)
        v_out: List[Optional[Term]] = [None] * len(V)
        counters: Dict[str, int] = defaultdict(int)
        for group in self._groups(U, V):
            us = [t for side, _, t in group if side == "u"]
            vs = [t for side, _, t in group if side == "v"]
            name = self.name_of(self._canon(us, vs))
            counters[name] += 1
            i = counters[name]
            j = 0
            for side, k, _ in [g for g in group if g[0] == "u"] + [g for g in group if g[0] == "v"]:
                j += 1
                (u_out if side == "u" else v_out)[k] = inst(name, i, j)
        return u_out, v_out

    def emit(self, head: str, left: Sequence[Term], right: Sequence[Term], comment: str) -> None:
        self.prods.append(Production(head, tuple(left) + tuple(right), comment))

    # productions ------------------------------------------------------------

    def start(self) -> None:
        for f, n in self.alphabet.symbols:
            self.emit(START, [App(f, tuple(inst(START, i, 1) for i in range(1, n + 1)))],
                      [App(f, tuple(inst(START, i, 2) for i in range(1, n + 1)))], f"copy {f}")
            self.emit(ANY, [App(f, tuple(inst(ANY, i, 1) for i in range(1, n + 1)))], [], f"any {f}")
        for s in self.S.states:
            t = self.S.state_term(s.name, [f"x{i}" for i in range(1, s.arity + 1)])
            u, v = self.instantiate([t], [t])
            self.emit(START, u, v, f"start at {s.name}")

    def expand(self, key) -> None:
        U, V = key
        head = self.names[key]
        fresh = itertools.count(1)
        # bridging steps on either side
        for k, t in enumerate(U):
            for src, _, idx in self.eq_by_dst[t.sym]:
                args: List[Term] = [Var(f"_z{next(fresh)}") for _ in range(self.info[src].arity)]
                for i, j in enumerate(idx):
                    args[j] = t.args[i]
                U2 = U[:k] + (App(src, tuple(args)),) + U[k + 1:]
                u, v = self.instantiate(U2, V)
                self.emit(head, u, v, f"eq {src} -> {t.sym}")
        for k, t in enumerate(V):
            for _, dst, idx in self.eq_by_src[t.sym]:
                V2 = V[:k] + (App(dst, tuple(t.args[i] for i in idx)),) + V[k + 1:]
                u, v = self.instantiate(U, V2)
                self.emit(head, u, v, f"eq {t.sym} -> {dst}")
        # consume one symbol on the left
        for k, t in enumerate(U):
            for f, kids, _ in self.consume_into[t.sym]:
                children = self._split(t.args, kids)
                U2 = U[:k] + tuple(children) + U[k + 1:]
                u, v = self.instantiate(U2, V)
                left = u[:k] + [App(f, tuple(u[k:k + len(kids)]))] + u[k + len(kids):]
                self.emit(head, left, v, f"consume {f} into {t.sym}")
        # produce one symbol on the right
        for k, t in enumerate(V):
            for _, f, kids in self.produce_from[t.sym]:
                children = self._split(t.args, kids)
                V2 = V[:k] + tuple(children) + V[k + 1:]
                u, v = self.instantiate(U, V2)
                right = v[:k] + [App(f, tuple(v[k:k + len(kids)]))] + v[k + len(kids):]
                self.emit(head, u, right, f"produce {f} from {t.sym}")
        # restart below variable leaves
        if len(U) == 1 and U[0].sym in self.var_consumers and len(U[0].args) == 1:
            if len(V) == 1 and V[0].sym in self.var_producers and V[0].args == U[0].args:
                self.emit(head, [inst(START, 1, 1)], [inst(START, 1, 2)], "restart")
            elif not V:
                self.emit(head, [inst(ANY, 1, 1)], [], "restart, erased")

    def _split(self, args: Sequence[Term], kids: Sequence[str]) -> List[Term]:
        out, pos = [], 0
        for kid in kids:
            n = self.info[kid].arity
            out.append(App(kid, tuple(args[pos:pos + n])))
            pos += n
        return out

    def grammar(self) -> TupleGrammar:
        self.start()
        while self.todo:
            self.expand(self.todo.pop(0))
        nts = [NonTerminal(START, 2, (1, 1)), NonTerminal(ANY, 1, (1, 0))]
        comments = [(START, "axiom: derivation pairs"), (ANY, "every ground tree")]
        for (U, V), name in self.names.items():
            nts.append(NonTerminal(name, len(U) + len(V), (len(U), len(V))))
            comments.append((name, f"{' '.join(map(format_term, U))} | {' '.join(map(format_term, V))}"))
        seen, prods = set(), []
        for p in self.prods:
            if (p.head, p.body) not in seen:
                seen.add((p.head, p.body))
                prods.append(p)
        return check(TupleGrammar(tuple(nts), tuple(prods), START, self.alphabet, tuple(comments)))


def require_suffix(R: Trs) -> None:
    if R.rules:
        report = classify(Trs(R.alphabet, R.rules, (), R.vars))
        if SUFFIX not in report:
            raise ClassVeto(f"the system is not suffix: {report.witnesses[SUFFIX].describe()}",
                            report.witnesses[SUFFIX])


def build_suffix_grammar(R: Trs, T: Optional[SaturationTriple] = None, cap: Optional[int] = None) -> TupleGrammar:
    """Tuple grammar generating the derivation relation of a linear suffix system."""
    require_suffix(R)
    T = saturate(to_state_system(R)) if T is None else T
    return _SuffixGrammar(T, _cap() if cap is None else cap).grammar()


def image_automaton_suffix(R: Trs, A: TreeAutomaton, side: str = "forward",
                           G: Optional[TupleGrammar] = None) -> TreeAutomaton:
    """Image (``forward``) or inverse image (``inverse``) of L(A) under ->*_R."""
    if side not in ("forward", "inverse"):
        raise TermError(f"side must be forward or inverse, got {side!r}")
    G = build_suffix_grammar(R) if G is None else G
    run, keep = (1, 2) if side == "forward" else (2, 1)
    product, axioms = synchronize(G, A, side=run, max_nonterminals=_cap())
    return project_split(product, keep, axioms, R.alphabet)
