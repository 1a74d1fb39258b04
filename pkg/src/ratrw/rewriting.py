"""Rewrite rules, one-step rewriting and bounded reachability oracles.

The oracles explore by breadth-first search and prune any term larger than
``max_size``; they are sound unconditionally and complete only within their
bounds.  ``max_steps=None`` runs to the (finite) fixpoint under the size bound.
"""

from __future__ import annotations

import os
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Dict, FrozenSet, Hashable, Iterable, Iterator, List, Optional, Sequence, Set, Tuple

from .automata import TreeAutomaton, parse_automaton
from .terms import (
    App,
    Position,
    RankedAlphabet,
    Term,
    TermError,
    Var,
    format_term,
    is_linear,
    is_strict_prefix,
    match,
    parse_term,
    replace_at,
    size,
    sort_key,
    strip_comment,
    subterms,
    substitute,
    symbols,
    variables,
)


@dataclass(frozen=True)
class RewriteRule:
    lhs: Term
    rhs: Term

    def __post_init__(self):
        extra = set(variables(self.rhs)) - set(variables(self.lhs))
        if extra:
            raise TermError(f"rule {self}: rhs variables {sorted(extra)} do not occur in the lhs")

    @property
    def linear(self) -> bool:
        return is_linear(self.lhs) and is_linear(self.rhs)

    def inverse(self) -> "RewriteRule":
        return RewriteRule(self.rhs, self.lhs)

    def __str__(self) -> str:
        return f"{format_term(self.lhs)} -> {format_term(self.rhs)}"


@dataclass(frozen=True)
class AutomatonRule:
    """Recognizable rule family ``U -> V``; variables appear as nullary labels."""

    source: TreeAutomaton
    target: TreeAutomaton
    names: Tuple[str, str] = ("U", "V")


@dataclass(frozen=True)
class Trs:
    alphabet: RankedAlphabet
    rules: Tuple[RewriteRule, ...] = ()
    recognizable: Tuple[AutomatonRule, ...] = ()
    vars: Tuple[str, ...] = ()

    def __post_init__(self):
        arities = self.alphabet.arities
        declared = set(self.vars)
        for r in self.rules:
            for side in (r.lhs, r.rhs):
                for f, n in symbols(side):
                    if arities.get(f) != n:
                        raise TermError(f"rule {r}: symbol {f}/{n} not in the alphabet")
        if not declared:
            names: List[str] = []
            for r in self.rules:
                for v in variables(r.lhs):
                    if v not in names:
                        names.append(v)
            object.__setattr__(self, "vars", tuple(names))

    @classmethod
    def of(cls, alphabet, rules: Iterable[Tuple[str, str]] = (), vars: Iterable[str] = ("x", "y", "z")) -> "Trs":
        """Convenience constructor from ``("lhs", "rhs")`` strings."""
        if not isinstance(alphabet, RankedAlphabet):
            alphabet = RankedAlphabet.of(alphabet)
        vs = tuple(vars)
        parsed = tuple(
            RewriteRule(parse_term(l, alphabet, vs), parse_term(r, alphabet, vs)) for l, r in rules
        )
        return cls(alphabet, parsed)

    @property
    def linear(self) -> bool:
        return all(r.linear for r in self.rules)

    @property
    def finite_only(self) -> bool:
        return not self.recognizable

    def inverse(self) -> "Trs":
        if self.recognizable:
            raise TermError("inverse of a recognizable system is not supported")
        return Trs(self.alphabet, tuple(r.inverse() for r in self.rules), (), self.vars)

    def __len__(self):
        return len(self.rules)


@dataclass(frozen=True)
class RewriteStep:
    rule: int
    position: Position
    substitution: Tuple[Tuple[str, Term], ...]

    def replay(self, R: Trs, t: Term) -> Term:
        rule = R.rules[self.rule]
        sigma = dict(self.substitution)
        return replace_at(t, self.position, substitute(rule.rhs, sigma))


class UnsupportedSystem(TermError):
    """The operation is not defined for this kind of system."""


def _finite(R: Trs) -> None:
    if R.recognizable:
        raise UnsupportedSystem("bounded oracles only handle finite rule sets")


def _redexes(R: Trs, t: Term) -> Iterator[Tuple[int, Position, Dict[str, Term]]]:
    for p, sub in subterms(t):
        for i, rule in enumerate(R.rules):
            sigma = match(rule.lhs, sub)
            if sigma is not None:
                yield i, p, sigma


def rewrite_step(R: Trs, t: Term) -> Set[Tuple[Term, RewriteStep]]:
    _finite(R)
    out = set()
    for i, p, sigma in _redexes(R, t):
        succ = replace_at(t, p, substitute(R.rules[i].rhs, sigma))
        out.add((succ, RewriteStep(i, p, tuple(sorted(sigma.items())))))
    return out


def suffix_step(R: Trs, t: Term) -> Set[Tuple[Term, RewriteStep]]:
    """One suffix-rewriting step: the matcher must be a bijective variable renaming."""
    _finite(R)
    out = set()
    for i, p, sigma in _redexes(R, t):
        images = list(sigma.values())
        if not all(isinstance(v, Var) for v in images) or len(set(images)) != len(images):
            continue
        succ = replace_at(t, p, substitute(R.rules[i].rhs, sigma))
        out.add((succ, RewriteStep(i, p, tuple(sorted(sigma.items())))))
    return out


def _bfs(start: Hashable, successors: Callable, max_steps: Optional[int], keep: Callable[[Hashable], bool]):
    """Generic BFS returning ``{state: (parent, step)}``."""
    parents: Dict[Hashable, Tuple[Optional[Hashable], Optional[RewriteStep]]] = {start: (None, None)}
    frontier = [start]
    depth = 0
    while frontier and (max_steps is None or depth < max_steps):
        nxt = []
        for state in frontier:
            for succ, step in successors(state):
                if succ in parents or not keep(succ):
                    continue
                parents[succ] = (state, step)
                nxt.append(succ)
        frontier = nxt
        depth += 1
    return parents


def reachable(R: Trs, t: Term, max_steps: Optional[int] = None, max_size: int = 20) -> Set[Term]:
    _finite(R)
    return set(explore(R, t, max_steps, max_size))


def explore(R: Trs, t: Term, max_steps: Optional[int] = None, max_size: int = 20, step=rewrite_step):
    """Parent map of the bounded search; every entry replays back to ``t``."""
    return _bfs(t, lambda u: step(R, u), max_steps, lambda u: size(u) <= max_size)


def trace(parents, target) -> List[Tuple[Term, RewriteStep]]:
    """Step sequence leading to ``target`` in a parent map from :func:`explore`."""
    seq = []
    while True:
        parent, step = parents[target]
        if parent is None:
            break
        seq.append((parent, step))
        target = parent
    return seq[::-1]


def topdown_step_allowed(used: FrozenSet[Position], last: Optional[Position], p: Position, lhs: Term) -> bool:
    """Positions never strictly rise above an earlier one; equal consecutive
    positions forbid a bare-variable left-hand side."""
    if any(is_strict_prefix(p, u) for u in used):
        return False
    if last is not None and p == last and isinstance(lhs, Var):
        return False
    return True


def topdown_reachable(R: Trs, t: Term, max_steps: Optional[int] = None, max_size: int = 20) -> Set[Term]:
    _finite(R)

    def successors(state):
        term, used, last = state
        for succ, step in rewrite_step(R, term):
            p = step.position
            if not topdown_step_allowed(used, last, p, R.rules[step.rule].lhs):
                continue
            # only the maximal used positions matter for the prefix test
            kept = frozenset(u for u in used if not is_strict_prefix(u, p)) | {p}
            yield (succ, kept, p), step

    parents = _bfs((t, frozenset(), None), successors, max_steps, lambda s: size(s[0]) <= max_size)
    return {s[0] for s in parents}


def suffix_reachable(R: Trs, t: Term, max_steps: Optional[int] = None, max_size: int = 20) -> Set[Term]:
    _finite(R)
    return set(explore(R, t, max_steps, max_size, step=suffix_step))


def reachable_pairs(R: Trs, seeds: Iterable[Term], max_size: int, max_steps: Optional[int] = None,
                    result_size: Optional[int] = None, oracle=reachable) -> Set[Tuple[Term, Term]]:
    """All (s, t) with t found by ``oracle`` from s, t restricted to ``result_size``."""
    out = set()
    for s in seeds:
        for u in oracle(R, s, max_steps=max_steps, max_size=max_size):
            if result_size is None or size(u) <= result_size:
                out.add((s, u))
    return out


def sorted_terms(ts: Iterable[Term]) -> List[Term]:
    return sorted(ts, key=sort_key)


# ---------------------------------------------------------------------------
# file format

def parse_trs(text: str, base_dir: str = ".", alphabet: Optional[RankedAlphabet] = None) -> Trs:
    vars_: List[str] = []
    raw_rules: List[Tuple[int, str]] = []
    raw_auto: List[Tuple[int, str]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = strip_comment(raw)
        if not line:
            continue
        key, sep, rest = line.partition(":")
        if not sep:
            raise TermError(f"line {lineno}: expected 'key: value'")
        key = key.strip()
        if key == "alphabet":
            declared = RankedAlphabet.of(rest)
            alphabet = declared if alphabet is None else alphabet.union(declared)
        elif key == "vars":
            vars_.extend(rest.split())
        elif key == "rule":
            raw_rules.append((lineno, rest))
        elif key == "autorule":
            raw_auto.append((lineno, rest))
        elif key == "states":
            continue  # informational section of saturation dumps
        else:
            raise TermError(f"line {lineno}: unknown key {key!r}")
    if alphabet is None:
        raise TermError("TRS file has no alphabet")
    rules = []
    for lineno, rest in raw_rules:
        lhs, arrow, rhs = rest.partition("->")
        if not arrow:
            raise TermError(f"line {lineno}: expected 'rule: lhs -> rhs'")
        try:
            rules.append(RewriteRule(parse_term(lhs.strip(), alphabet, vars_), parse_term(rhs.strip(), alphabet, vars_)))
        except TermError as exc:
            raise TermError(f"line {lineno}: {exc}") from exc
    autos = []
    extended = alphabet.union(RankedAlphabet(tuple((v, 0) for v in vars_ if v not in alphabet)))
    for lineno, rest in raw_auto:
        left, arrow, right = rest.partition("->")
        if not arrow:
            raise TermError(f"line {lineno}: expected 'autorule: fileU -> fileV'")
        pair = []
        for name in (left.strip(), right.strip()):
            with open(os.path.join(base_dir, name), encoding="utf-8") as fh:
                pair.append(parse_automaton(fh.read(), extended))
        autos.append(AutomatonRule(pair[0], pair[1], (left.strip(), right.strip())))
    return Trs(alphabet, tuple(rules), tuple(autos), tuple(vars_))


def load_trs(path: str) -> Trs:
    with open(path, encoding="utf-8") as fh:
        return parse_trs(fh.read(), os.path.dirname(os.path.abspath(path)))


def format_trs(R: Trs, states: Sequence[str] = ()) -> str:
    lines = [f"alphabet: {R.alphabet}"]
    if R.vars:
        lines.append(f"vars: {' '.join(R.vars)}")
    if states:
        lines.append(f"states: {' '.join(states)}")
    for r in R.rules:
        lines.append(f"rule: {r}")
    for a in R.recognizable:
        lines.append(f"autorule: {a.names[0]} -> {a.names[1]}")
    return "\n".join(lines) + "\n"
