import random
from collections import Counter

from hypothesis import given, settings
from hypothesis import strategies as st

from ratrw.classifier import TOPDOWN, classify
from ratrw.generators import SystemConfig, random_ground_terms, random_system, random_systems
from ratrw.terms import size
from ratrw.topdown import overlap_set


def test_seeded_suite_is_frozen():
    systems = random_systems(2024, 50)
    assert Counter(len(overlap_set(R)) for R in systems) == {1: 26, 2: 22, 3: 2}
    assert sum(len(R.rules) for R in systems) == 80
    assert [str(r) for r in systems[0].rules] == ["b -> a"]


def test_same_seed_same_systems():
    assert random_systems(7, 5) == random_systems(7, 5)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_generated_systems_fit_the_config(seed):
    cfg = SystemConfig()
    R = random_system(random.Random(seed), cfg)
    assert R.linear and TOPDOWN in classify(R)
    assert 1 <= len(R.rules) <= cfg.max_rules
    assert len(R.alphabet) <= cfg.max_symbols


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 6))
def test_ground_term_sampling(seed, bound):
    R = random_system(random.Random(seed))
    terms = random_ground_terms(random.Random(seed), R.alphabet, 10, bound)
    assert len(set(terms)) == len(terms)
    assert all(size(t) <= bound for t in terms)
