"""Hypothesis strategies shared by the property tests."""

import random

from hypothesis import strategies as st

from ratrw.generators import SystemConfig, random_system
from ratrw.terms import App, RankedAlphabet, Var

ALPHABET = RankedAlphabet.of("f/2 g/1 h/1 a/0 b/0")
VARS = ("x", "y", "z")


def ground_terms(alphabet=ALPHABET, max_leaves=6):
    leaves = st.sampled_from([App(f, ()) for f, n in alphabet.symbols if n == 0])

    def extend(children):
        options = [
            st.tuples(*([children] * n)).map(lambda args, f=f: App(f, args))
            for f, n in alphabet.symbols if n > 0
        ]
        return st.one_of(options)

    return st.recursive(leaves, extend, max_leaves=max_leaves)


@st.composite
def linear_terms(draw, alphabet=ALPHABET, max_depth=3):
    """A linear term over ``alphabet`` and the variables x, y, z."""
    free = list(VARS)

    def go(depth):
        if free and (depth == 0 or draw(st.booleans())) and draw(st.integers(0, 2)) == 0:
            return Var(free.pop(0))
        syms = [(f, n) for f, n in alphabet.symbols if depth > 0 or n == 0]
        f, n = draw(st.sampled_from(syms))
        return App(f, tuple(go(depth - 1) for _ in range(n)))

    return go(max_depth)


def topdown_systems(max_rules=3):
    """Random linear top-down systems, drawn through the seeded generator."""
    cfg = SystemConfig(max_rules=max_rules)
    return st.integers(0, 2**32 - 1).map(lambda seed: random_system(random.Random(seed), cfg))


def any_systems(max_rules=2):
    cfg = SystemConfig(max_rules=max_rules, want=None, prefer_overlaps=0.0)
    return st.integers(0, 2**32 - 1).map(lambda seed: random_system(random.Random(seed), cfg))
