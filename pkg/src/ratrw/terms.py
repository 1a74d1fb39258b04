"""First-order terms over a ranked alphabet.

Terms are immutable named tuples, so they hash and compare structurally and
can be used directly as set members and dict keys.  Contexts are ordinary
terms whose variables are the reserved holes ``□1 … □n``.
"""

from __future__ import annotations

import itertools
import re
import warnings
from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, List, NamedTuple, Optional, Sequence, Tuple, Union

HOLE = "□"


class Var(NamedTuple):
    name: str

    def __repr__(self) -> str:
        return self.name


class App(NamedTuple):
    sym: str
    args: Tuple["Term", ...] = ()

    def __repr__(self) -> str:
        return format_term(self)


Term = Union[Var, App]
Position = Tuple[int, ...]
TermWord = Tuple[Term, ...]
Substitution = Dict[str, Term]


class TermError(ValueError):
    """Raised for malformed terms, positions or concrete syntax."""

    def __init__(self, message: str, offset: Optional[int] = None):
        if offset is not None:
            message = f"{message} (at offset {offset})"
        super().__init__(message)
        self.offset = offset


@dataclass(frozen=True)
class RankedAlphabet:
    symbols: Tuple[Tuple[str, int], ...]

    def __post_init__(self):
        names = [n for n, _ in self.symbols]
        if len(set(names)) != len(names):
            raise TermError(f"duplicate symbol in alphabet: {names}")
        for n, a in self.symbols:
            if a < 0:
                raise TermError(f"negative arity for {n}")
            if n.startswith(HOLE):
                raise TermError(f"hole symbol {n} cannot be part of an alphabet")
        if self.symbols and not any(a == 0 for _, a in self.symbols):
            warnings.warn("alphabet has no constant: there are no ground terms", stacklevel=2)

    @classmethod
    def of(cls, spec: Union[str, Dict[str, int], Iterable[Tuple[str, int]]]) -> "RankedAlphabet":
        """Build from ``"f/2 g/1 a/0"``, a dict, or (name, arity) pairs."""
        if isinstance(spec, str):
            pairs = []
            for tok in spec.split():
                name, _, ar = tok.rpartition("/")
                if not name or not ar.isdigit():
                    raise TermError(f"bad alphabet entry {tok!r}")
                pairs.append((name, int(ar)))
            return cls(tuple(pairs))
        if isinstance(spec, dict):
            return cls(tuple(spec.items()))
        return cls(tuple(spec))

    def arity(self, name: str) -> int:
        return self.arities[name]

    @property
    def arities(self) -> Dict[str, int]:
        return dict(self.symbols)

    def __contains__(self, name: str) -> bool:
        return name in self.arities

    def __iter__(self):
        return iter(self.symbols)

    def __len__(self):
        return len(self.symbols)

    def union(self, other: "RankedAlphabet") -> "RankedAlphabet":
        mine = self.arities
        extra = []
        for n, a in other.symbols:
            if n in mine:
                if mine[n] != a:
                    raise TermError(f"symbol {n} declared with arities {mine[n]} and {a}")
            else:
                extra.append((n, a))
        return RankedAlphabet(self.symbols + tuple(extra))

    def __str__(self) -> str:
        return " ".join(f"{n}/{a}" for n, a in self.symbols)


def const(name: str) -> App:
    return App(name, ())


def hole(i: int) -> Var:
    return Var(f"{HOLE}{i}")


def is_hole(t: Term) -> bool:
    return isinstance(t, Var) and t.name.startswith(HOLE)


# ---------------------------------------------------------------------------
# concrete syntax

_TOKEN = re.compile(r"\s*(?:([(),])|([^\s(),|]+))")


def parse_term(text: str, alphabet: Optional[RankedAlphabet] = None, vars: Iterable[str] = ()) -> Term:
    """Parse ``f(t1,...,tn)`` syntax.

    Identifiers in ``vars`` become variables.  With an alphabet every other
    identifier must be a declared symbol of matching arity; without one,
    arities are taken as written.
    """
    varset = set(vars)
    arities = alphabet.arities if alphabet is not None else None
    pos = 0

    def peek():
        m = _TOKEN.match(text, pos)
        return m if m and m.end() > m.start() else None

    def parse() -> Term:
        nonlocal pos
        m = peek()
        if m is None or m.group(2) is None:
            raise TermError("expected a symbol or variable", pos)
        name = m.group(2)
        start = m.start(2)
        pos = m.end()
        if name.startswith(HOLE) and name not in varset:
            raise TermError(f"reserved hole name {name!r}", start)
        nxt = peek()
        if nxt is not None and nxt.group(1) == "(":
            pos = nxt.end()
            args = [parse()]
            while True:
                m2 = peek()
                if m2 is None or m2.group(1) not in (",", ")"):
                    raise TermError("expected ',' or ')'", pos)
                pos = m2.end()
                if m2.group(1) == ")":
                    break
                args.append(parse())
            if name in varset:
                raise TermError(f"variable {name!r} applied to arguments", start)
            _check_symbol(name, len(args), arities, start)
            return App(name, tuple(args))
        if name in varset:
            return Var(name)
        _check_symbol(name, 0, arities, start)
        return App(name, ())

    term = parse()
    if text[pos:].strip():
        raise TermError("trailing input", pos + len(text[pos:]) - len(text[pos:].lstrip()))
    return term


def _check_symbol(name, n, arities, offset):
    if arities is None:
        return
    if name not in arities:
        raise TermError(f"unknown symbol {name!r}", offset)
    if arities[name] != n:
        raise TermError(f"arity mismatch: {name} expects {arities[name]} arguments, got {n}", offset)


_COMMENT = re.compile(r"(?:^|(?<=\s))#(?=\s|$)")


def strip_comment(line: str) -> str:
    """Drop a ``#`` comment; ``#`` glued to a name (``#0``, ``B#1.2``) is kept."""
    stripped = line.strip()
    if stripped.startswith("#") and (len(stripped) == 1 or not stripped[1].isalnum()):
        return ""
    m = _COMMENT.search(line)
    return (line[: m.start()] if m else line).strip()


def format_term(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    if not t.args:
        return t.sym
    return f"{t.sym}({','.join(format_term(a) for a in t.args)})"


def format_word(w: Sequence[Term]) -> str:
    return ", ".join(format_term(t) for t in w)


# ---------------------------------------------------------------------------
# traversal

def size(t: Term) -> int:
    if isinstance(t, Var):
        return 1
    return 1 + sum(size(a) for a in t.args)


def word_size(w: Sequence[Term]) -> int:
    return sum(size(t) for t in w)


def depth(t: Term) -> int:
    if isinstance(t, Var) or not t.args:
        return 1
    return 1 + max(depth(a) for a in t.args)


def positions(t: Term) -> List[Position]:
    """All positions of ``t`` in pre-order (root first)."""
    out: List[Position] = [()]
    if isinstance(t, App):
        for i, a in enumerate(t.args, 1):
            out.extend((i,) + p for p in positions(a))
    return out


def subterms(t: Term) -> Iterator[Tuple[Position, Term]]:
    yield (), t
    if isinstance(t, App):
        for i, a in enumerate(t.args, 1):
            for p, s in subterms(a):
                yield (i,) + p, s


def subterm_at(t: Term, p: Sequence[int]) -> Term:
    for k, i in enumerate(p):
        if isinstance(t, Var) or not 1 <= i <= len(t.args):
            raise TermError(f"invalid position {tuple(p)} (fails at index {k})")
        t = t.args[i - 1]
    return t


def replace_at(t: Term, p: Sequence[int], s: Term) -> Term:
    if not p:
        return s
    i = p[0]
    if isinstance(t, Var) or not 1 <= i <= len(t.args):
        raise TermError(f"invalid position {tuple(p)}")
    args = list(t.args)
    args[i - 1] = replace_at(args[i - 1], p[1:], s)
    return App(t.sym, tuple(args))


def is_prefix(q: Sequence[int], p: Sequence[int]) -> bool:
    """``p >= q`` in the prefix order: q is a sequence-prefix of p."""
    return len(q) <= len(p) and tuple(p[: len(q)]) == tuple(q)


def is_strict_prefix(q: Sequence[int], p: Sequence[int]) -> bool:
    return len(q) < len(p) and tuple(p[: len(q)]) == tuple(q)


def variables(t: Term) -> List[str]:
    """Variable occurrences, left to right (with repetitions)."""
    if isinstance(t, Var):
        return [t.name]
    out: List[str] = []
    for a in t.args:
        out.extend(variables(a))
    return out


def word_variables(w: Sequence[Term]) -> List[str]:
    out: List[str] = []
    for t in w:
        out.extend(variables(t))
    return out


def is_ground(t: Term) -> bool:
    if isinstance(t, Var):
        return False
    return all(is_ground(a) for a in t.args)


def is_linear(t: Union[Term, Sequence[Term]]) -> bool:
    vs = word_variables(t) if isinstance(t, (list, tuple)) and not isinstance(t, (Var, App)) else variables(t)
    return len(vs) == len(set(vs))


def symbols(t: Term) -> Iterator[Tuple[str, int]]:
    if isinstance(t, App):
        yield t.sym, len(t.args)
        for a in t.args:
            yield from symbols(a)


# ---------------------------------------------------------------------------
# substitution, matching, unification

def substitute(t: Term, sigma: Dict[str, Term]) -> Term:
    if isinstance(t, Var):
        return sigma.get(t.name, t)
    if not t.args:
        return t
    return App(t.sym, tuple(substitute(a, sigma) for a in t.args))


def match(pattern: Term, subject: Term, sigma: Optional[Substitution] = None) -> Optional[Substitution]:
    """Return the unique σ with ``substitute(pattern, σ) == subject``, or None.

    Variables of the subject are inert constants.
    """
    sigma = {} if sigma is None else dict(sigma)
    stack = [(pattern, subject)]
    while stack:
        p, s = stack.pop()
        if isinstance(p, Var):
            bound = sigma.get(p.name)
            if bound is None:
                sigma[p.name] = s
            elif bound != s:
                return None
        elif isinstance(s, Var) or p.sym != s.sym or len(p.args) != len(s.args):
            return None
        else:
            stack.extend(zip(p.args, s.args))
    return sigma


def _walk(t: Term, sigma: Substitution) -> Term:
    while isinstance(t, Var) and t.name in sigma:
        t = sigma[t.name]
    return t


def _occurs(name: str, t: Term, sigma: Substitution) -> bool:
    t = _walk(t, sigma)
    if isinstance(t, Var):
        return t.name == name
    return any(_occurs(name, a, sigma) for a in t.args)


def _resolve(t: Term, sigma: Substitution) -> Term:
    t = _walk(t, sigma)
    if isinstance(t, Var):
        return t
    return App(t.sym, tuple(_resolve(a, sigma) for a in t.args))


def unify(s: Term, t: Term) -> Optional[Substitution]:
    """Most general unifier (idempotent, fully resolved) or None."""
    sigma: Substitution = {}
    stack = [(s, t)]
    while stack:
        a, b = stack.pop()
        a, b = _walk(a, sigma), _walk(b, sigma)
        if a == b:
            continue
        if isinstance(a, Var):
            if _occurs(a.name, b, sigma):
                return None
            sigma[a.name] = b
        elif isinstance(b, Var):
            if _occurs(b.name, a, sigma):
                return None
            sigma[b.name] = a
        elif a.sym != b.sym or len(a.args) != len(b.args):
            return None
        else:
            stack.extend(zip(a.args, b.args))
    return {k: _resolve(v, sigma) for k, v in sigma.items()}


def rename_apart(t: Term, suffix: str = "'") -> Term:
    return substitute(t, {v: Var(v + suffix) for v in set(variables(t))})


# ---------------------------------------------------------------------------
# contexts and canonical forms

def to_context(t: Term) -> Tuple[Term, List[str]]:
    """Replace the i-th variable occurrence by hole i; return the context and the names."""
    names = variables(t)
    if len(names) != len(set(names)):
        raise TermError(f"to_context needs a linear term, got {format_term(t)}")
    counter = itertools.count(1)

    def go(u: Term) -> Term:
        if isinstance(u, Var):
            return hole(next(counter))
        if not u.args:
            return u
        return App(u.sym, tuple(go(a) for a in u.args))

    return go(t), names


def plug(c: Term, word: Sequence[Term]) -> Term:
    """``c[word]``: fill hole i with ``word[i-1]``."""
    return substitute(c, {f"{HOLE}{i}": w for i, w in enumerate(word, 1)})


def hole_count(c: Term) -> int:
    return sum(1 for v in variables(c) if v.startswith(HOLE))


def canonical(t: Union[Term, Sequence[Term]], prefix: str = "x") -> Union[Term, Tuple[Term, ...]]:
    """Rename variables to x1, x2, … by first occurrence (term or term word)."""
    if isinstance(t, (Var, App)):
        names = variables(t)
    else:
        names = word_variables(t)
    ren: Dict[str, Term] = {}
    for n in names:
        if n not in ren:
            ren[n] = Var(f"{prefix}{len(ren) + 1}")
    if isinstance(t, (Var, App)):
        return substitute(t, ren)
    return tuple(substitute(u, ren) for u in t)


def variant(s: Term, t: Term) -> bool:
    """Equal up to a bijective renaming of variables."""
    return canonical(s) == canonical(t)


# ---------------------------------------------------------------------------
# enumeration

def ground_terms_by_size(alphabet: RankedAlphabet, max_size: int) -> List[List[Term]]:
    """``out[k]`` lists every ground term of size exactly k (k ≤ max_size)."""
    out: List[List[Term]] = [[] for _ in range(max_size + 1)]
    syms = sorted(alphabet.symbols, key=lambda s: (s[1], s[0]))
    for k in range(1, max_size + 1):
        for name, ar in syms:
            if ar == 0:
                if k == 1:
                    out[1].append(App(name, ()))
                continue
            for sizes in _compositions(k - 1, ar):
                for args in itertools.product(*(out[s] for s in sizes)):
                    out[k].append(App(name, tuple(args)))
    return out


def ground_terms(alphabet: RankedAlphabet, max_size: int) -> List[Term]:
    return [t for layer in ground_terms_by_size(alphabet, max_size) for t in layer]


def _compositions(total: int, parts: int) -> Iterator[Tuple[int, ...]]:
    """Ordered ways to write total as a sum of ``parts`` positive integers."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        if total >= 1:
            yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def sort_key(t: Term):
    """Deterministic ordering: by size, then by printed form."""
    return (size(t), format_term(t))


def word_sort_key(w: Sequence[Term]):
    return (word_size(w), tuple(format_term(t) for t in w))
