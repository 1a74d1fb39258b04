"""Top-down nondeterministic finite tree automata."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

from .terms import App, RankedAlphabet, Term, TermError, Var, _compositions, format_term, is_ground, sort_key, strip_comment

Rule = Tuple[str, str, Tuple[str, ...]]


@dataclass(frozen=True)
class TreeAutomaton:
    """Rules ``(q, f, (q1, …, qn))`` read as ``q f -> f q1 … qn``.

    Variable names may label nullary rules; they then accept the variable
    itself (used for rule languages over F ∪ X).
    """

    alphabet: RankedAlphabet
    states: Tuple[str, ...]
    initial: FrozenSet[str]
    rules: FrozenSet[Rule]
    _by_state: Dict[str, Tuple[Rule, ...]] = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        declared = set(self.states)
        by_state: Dict[str, List[Rule]] = {q: [] for q in self.states}
        arities = self.alphabet.arities
        for q, f, qs in self.rules:
            missing = ({q} | set(qs)) - declared
            if missing:
                raise TermError(f"rule {q} {f} -> {' '.join(qs)} uses undeclared states {sorted(missing)}")
            if f in arities and arities[f] != len(qs):
                raise TermError(f"rule for {f} has {len(qs)} children, arity is {arities[f]}")
            by_state[q].append((q, f, qs))
        bad = set(self.initial) - declared
        if bad:
            raise TermError(f"undeclared initial states {sorted(bad)}")
        object.__setattr__(self, "_by_state", {q: tuple(sorted(rs)) for q, rs in by_state.items()})

    @classmethod
    def build(cls, alphabet, initial: Iterable[str], rules: Iterable[Rule], states: Iterable[str] = ()) -> "TreeAutomaton":
        rules = frozenset((q, f, tuple(qs)) for q, f, qs in rules)
        initial = frozenset(initial)
        seen = dict.fromkeys(states)
        for q, _, qs in sorted(rules):
            seen.setdefault(q)
            for p in qs:
                seen.setdefault(p)
        for q in sorted(initial):
            seen.setdefault(q)
        if not isinstance(alphabet, RankedAlphabet):
            alphabet = RankedAlphabet.of(alphabet)
        return cls(alphabet, tuple(seen), initial, rules)

    def rules_from(self, q: str) -> Tuple[Rule, ...]:
        return self._by_state.get(q, ())

    def __len__(self):
        return len(self.rules)


def accepts(A: TreeAutomaton, t: Term, open_terms: bool = False) -> bool:
    if not open_terms and not is_ground(t):
        raise TermError(f"accepts needs a ground term, got {format_term(t)}")
    return any(accepts_from(A, q, t) for q in sorted(A.initial))


def accepts_from(A: TreeAutomaton, q: str, t: Term) -> bool:
    memo: Dict[Tuple[str, Term], bool] = {}

    def run(state: str, u: Term) -> bool:
        key = (state, u)
        hit = memo.get(key)
        if hit is not None:
            return hit
        if isinstance(u, Var):
            ok = any(f == u.name and not qs for _, f, qs in A.rules_from(state))
        else:
            ok = any(
                f == u.sym and len(qs) == len(u.args) and all(run(p, a) for p, a in zip(qs, u.args))
                for _, f, qs in A.rules_from(state)
            )
        memo[key] = ok
        return ok

    return run(q, t)


def run_forest(A: TreeAutomaton, state_word: Sequence[str], word: Sequence[Term]) -> List[Dict[str, str]]:
    """Partial runs from ``state_word`` over an open term word.

    Each result maps every variable of ``word`` to the state the run reaches
    at that leaf (the final control word, keyed by frontier variable).
    """
    if len(state_word) != len(word):
        raise TermError("state word and term word lengths differ")
    results: List[Dict[str, str]] = [{}]
    for q, t in zip(state_word, word):
        partial = _runs(A, q, t)
        results = [dict(r, **p) for r in results for p in partial]
        if not results:
            break
    return results


def _runs(A: TreeAutomaton, q: str, t: Term) -> List[Dict[str, str]]:
    if isinstance(t, Var):
        return [{t.name: q}]
    out: List[Dict[str, str]] = []
    for _, f, qs in A.rules_from(q):
        if f != t.sym or len(qs) != len(t.args):
            continue
        combos: List[Dict[str, str]] = [{}]
        for p, a in zip(qs, t.args):
            sub = _runs(A, p, a)
            combos = [dict(c, **s) for c in combos for s in sub]
            if not combos:
                break
        out.extend(combos)
    return out


def productive_states(A: TreeAutomaton) -> Set[str]:
    prod: Set[str] = set()
    changed = True
    while changed:
        changed = False
        for q, _, qs in A.rules:
            if q not in prod and all(p in prod for p in qs):
                prod.add(q)
                changed = True
    return prod


def is_empty(A: TreeAutomaton) -> bool:
    return not (productive_states(A) & A.initial)


def language_by_size(A: TreeAutomaton, max_size: int) -> Dict[str, List[Set[Term]]]:
    """``out[q][k]``: terms of size exactly k accepted from state q."""
    prod = productive_states(A)
    lang: Dict[str, List[Set[Term]]] = {q: [set() for _ in range(max_size + 1)] for q in A.states}
    for k in range(1, max_size + 1):
        for q in A.states:
            if q not in prod:
                continue
            bucket = lang[q][k]
            for _, f, qs in A.rules_from(q):
                if not qs:
                    if k == 1 and f in A.alphabet:
                        bucket.add(App(f, ()))
                    continue
                for sizes in _compositions(k - 1, len(qs)):
                    pools = [lang[p][s] for p, s in zip(qs, sizes)]
                    if any(not pool for pool in pools):
                        continue
                    for args in itertools.product(*pools):
                        bucket.add(App(f, tuple(args)))
    return lang


def enumerate_language(A: TreeAutomaton, max_size: int) -> Set[Term]:
    if max_size <= 0:
        return set()
    lang = language_by_size(A, max_size)
    out: Set[Term] = set()
    for q in A.initial:
        for layer in lang[q]:
            out |= layer
    return out


def trim(A: TreeAutomaton) -> TreeAutomaton:
    """Drop unproductive and unreachable states."""
    prod = productive_states(A)
    rules = [r for r in A.rules if r[0] in prod and all(p in prod for p in r[2])]
    by_state: Dict[str, List[Rule]] = {}
    for r in rules:
        by_state.setdefault(r[0], []).append(r)
    reach: Set[str] = set()
    todo = [q for q in A.initial if q in prod]
    while todo:
        q = todo.pop()
        if q in reach:
            continue
        reach.add(q)
        for _, _, qs in by_state.get(q, []):
            todo.extend(qs)
    kept = [r for r in rules if r[0] in reach]
    states = [q for q in A.states if q in reach]
    return TreeAutomaton.build(A.alphabet, [q for q in A.initial if q in reach], kept, states)


def finite_automaton(alphabet: RankedAlphabet, terms: Iterable[Term], prefix: str = "s") -> TreeAutomaton:
    """Automaton accepting exactly the given finite set of ground terms."""
    names: Dict[Term, str] = {}
    rules: Set[Rule] = set()

    def state_for(t: Term) -> str:
        if t not in names:
            names[t] = f"{prefix}{len(names)}"
            qs = tuple(state_for(a) for a in t.args)
            rules.add((names[t], t.sym, qs))
        return names[t]

    roots = [state_for(t) for t in sorted(set(terms), key=sort_key)]
    init = f"{prefix}_init"
    for q, f, qs in list(rules):
        if q in roots:
            rules.add((init, f, qs))
    return TreeAutomaton.build(alphabet, [init], rules, [init])


def universal_automaton(alphabet: RankedAlphabet, state: str = "q") -> TreeAutomaton:
    rules = [(state, f, (state,) * n) for f, n in alphabet.symbols]
    return TreeAutomaton.build(alphabet, [state], rules, [state])


# ---------------------------------------------------------------------------
# file format

def parse_automaton(text: str, alphabet: Optional[RankedAlphabet] = None) -> TreeAutomaton:
    states: List[str] = []
    initial: List[str] = []
    rules: List[Rule] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = strip_comment(raw)
        if not line:
            continue
        key, _, rest = line.partition(":")
        key = key.strip()
        if key == "alphabet":
            declared = RankedAlphabet.of(rest)
            alphabet = declared if alphabet is None else alphabet.union(declared)
        elif key == "states":
            states.extend(rest.split())
        elif key == "initial":
            initial.extend(rest.split())
        elif key == "rule":
            lhs, arrow, rhs = rest.partition("->")
            parts = lhs.split()
            if not arrow or len(parts) != 2:
                raise TermError(f"line {lineno}: expected 'rule: q f -> q1 ... qn'")
            rules.append((parts[0], parts[1], tuple(rhs.split())))
        else:
            raise TermError(f"line {lineno}: unknown key {key!r}")
    if alphabet is None:
        raise TermError("automaton file has no alphabet")
    return TreeAutomaton.build(alphabet, initial, rules, states)


def format_automaton(A: TreeAutomaton) -> str:
    lines = [
        f"alphabet: {A.alphabet}",
        f"states: {' '.join(A.states)}",
        f"initial: {' '.join(sorted(A.initial))}",
    ]
    order = {q: i for i, q in enumerate(A.states)}
    for q, f, qs in sorted(A.rules, key=lambda r: (order[r[0]], r[1], r[2])):
        lines.append(f"rule: {q} {f} -> {' '.join(qs)}".rstrip())
    return "\n".join(lines) + "\n"
