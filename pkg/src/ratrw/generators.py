"""Seeded generators of small alphabets, terms and rewriting systems."""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import List, Optional, Sequence

from .classifier import classify
from .rewriting import RewriteRule, Trs
from .topdown import overlap_set
from .terms import App, RankedAlphabet, Term, Var, ground_terms, size

POOL = (("a", 0), ("b", 0), ("g", 1), ("h", 1), ("f", 2))


@dataclass
class SystemConfig:
    max_rules: int = 3
    max_symbols: int = 5
    max_depth: int = 2
    vars: Sequence[str] = ("x", "y", "z")
    want: str = "TopDown"
    # chance of resampling a system whose only overlap context is the hole
    prefer_overlaps: float = 0.6
    max_tries: int = 10_000


def random_alphabet(rng: random.Random, max_symbols: int = 5) -> RankedAlphabet:
    k = rng.randint(3, min(max_symbols, len(POOL)))
    picked = [POOL[0]] + rng.sample(POOL[1:], k - 1)
    if not any(a > 0 for _, a in picked):
        picked[-1] = POOL[-1]
    return RankedAlphabet(tuple(sorted(set(picked), key=POOL.index)))


def random_linear_term(rng: random.Random, alphabet: RankedAlphabet, depth: int, free: List[str],
                       allow_var: bool = True) -> Term:
    """Linear term; variables are consumed from ``free``."""
    if allow_var and free and (depth == 0 or rng.random() < 0.35):
        return Var(free.pop(0))
    syms = [(f, n) for f, n in alphabet.symbols if depth > 0 or n == 0]
    f, n = rng.choice(syms)
    return App(f, tuple(random_linear_term(rng, alphabet, depth - 1, free) for _ in range(n)))


def random_rule(rng: random.Random, alphabet: RankedAlphabet, cfg: SystemConfig) -> RewriteRule:
    lhs = random_linear_term(rng, alphabet, rng.randint(1, cfg.max_depth), list(cfg.vars), allow_var=False)
    used = [v for v in cfg.vars if v in {x.name for x in _vars(lhs)}]
    rng.shuffle(used)
    rhs = random_linear_term(rng, alphabet, rng.randint(0, cfg.max_depth), used)
    return RewriteRule(lhs, rhs)


def _vars(t: Term):
    if isinstance(t, Var):
        yield t
    else:
        for a in t.args:
            yield from _vars(a)


def random_system(rng: random.Random, cfg: Optional[SystemConfig] = None) -> Trs:
    """A random linear system in the class ``cfg.want`` (rejection sampling)."""
    cfg = cfg or SystemConfig()
    for _ in range(cfg.max_tries):
        alphabet = random_alphabet(rng, cfg.max_symbols)
        rules = tuple(dict.fromkeys(random_rule(rng, alphabet, cfg) for _ in range(rng.randint(1, cfg.max_rules))))
        if any(r.lhs == r.rhs for r in rules):
            continue
        R = Trs(alphabet, rules, (), tuple(cfg.vars))
        if cfg.want is not None and cfg.want not in classify(R):
            continue
        if len(overlap_set(R, check_class=False)) == 1 and rng.random() < cfg.prefer_overlaps:
            continue
        return R
    raise RuntimeError(f"no {cfg.want} system found in {cfg.max_tries} tries")


def random_systems(seed: int, count: int, cfg: Optional[SystemConfig] = None) -> List[Trs]:
    rng = random.Random(seed)
    return [random_system(rng, cfg) for _ in range(count)]


def random_ground_terms(rng: random.Random, alphabet: RankedAlphabet, count: int, max_size: int) -> List[Term]:
    pool = [t for t in ground_terms(alphabet, max_size) if size(t) <= max_size]
    if len(pool) <= count:
        return pool
    return rng.sample(pool, count)
