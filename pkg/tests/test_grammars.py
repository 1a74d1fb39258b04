import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ratrw.automata import accepts, universal_automaton
from ratrw.grammars import (
    NonTerminal,
    Production,
    TupleGrammar,
    contains_tuple,
    enumerate_by_derivation,
    enumerate_tuples,
    format_grammar,
    inst,
    iterate_subst,
    parse_grammar,
    project_split,
    subst_product,
    swap_projections,
    synchronize,
    validate,
)
from ratrw.terms import App, RankedAlphabet, TermError, Var, parse_term, word_size
from ratrw.topdown import build_grammar

F = RankedAlphabet.of("f/2 g/1 h/1 a/0")
a = App("a", ())


def t(text):
    return parse_term(text, F)


def g_pow(n, u):
    for _ in range(n):
        u = App("g", (u,))
    return u


class TestValidate:
    def test_example_grammar_ok(self, fg_ref):
        assert validate(fg_ref) == []

    def test_arity_violation(self):
        G = TupleGrammar((NonTerminal("A", 2),), (Production("A", (a,)),), "A", F)
        assert any("arity" in e for e in validate(G))

    def test_grouping_violation(self):
        nts = (NonTerminal("A", 2), NonTerminal("B", 3))
        body = (App("f", (inst("B", 1, 1), inst("B", 1, 2))), a)
        G = TupleGrammar(nts, (Production("A", body),), "A", F)
        assert any("misses components [3]" in e for e in validate(G))

    def test_parse_rejects_bad_grammar(self):
        with pytest.raises(TermError):
            parse_grammar("alphabet: a/0\nnonterminal: A/2\naxiom: A\nprod: A -> a\n")


class TestEnumerate:
    def test_smallest(self, fg_ref):
        assert enumerate_tuples(fg_ref, "A", 2) == {(a, a)}

    def test_contains_derived_pair(self, fg_ref):
        assert (t("f(g(a),g(a))"), t("h(f(a,a))")) in enumerate_tuples(fg_ref, "A", 10)

    def test_zero_bound(self, fg_ref):
        assert enumerate_tuples(fg_ref, "A", 0) == set()

    def test_frozen_counts(self, fg_ref):
        # pairs (s, t) with s ->* t and size(s) + size(t) <= n, from the rewriting oracle
        counts = [len(enumerate_tuples(fg_ref, "A", n)) for n in range(2, 11)]
        assert counts == [1, 1, 3, 3, 8, 8, 22, 23, 65]

    def test_agrees_with_naive_derivation(self, fg_ref):
        assert enumerate_tuples(fg_ref, "A", 8) == enumerate_by_derivation(fg_ref, "A", 8)

    def test_derivation_order_independent(self, fg_ref):
        left = enumerate_by_derivation(fg_ref, "A", 8, order="leftmost")
        assert all(enumerate_by_derivation(fg_ref, "A", 8, order="random", seed=s) == left for s in range(3))


class TestMembership:
    def test_member(self, fg_ref):
        assert contains_tuple(fg_ref, "A", (t("f(g(a),g(a))"), t("h(f(a,a))")))

    def test_non_member(self, fg_ref):
        assert not contains_tuple(fg_ref, "A", (a, t("g(a)")))

    def test_wrong_length(self, fg_ref):
        assert not contains_tuple(fg_ref, "A", (a,))

    def test_matches_enumeration(self, fg_ref):
        from ratrw.terms import ground_terms

        pool = ground_terms(F, 5)
        listed = enumerate_tuples(fg_ref, "A", 10)
        for s in pool:
            for u in pool:
                assert contains_tuple(fg_ref, "A", (s, u)) == ((s, u) in listed)


class TestSwap:
    def test_swapped_pair(self, fg_ref):
        S = swap_projections(fg_ref)
        assert contains_tuple(S, "A", (t("h(f(a,a))"), t("f(g(a),g(a))")))

    def test_involution(self, fg_ref):
        assert swap_projections(swap_projections(fg_ref)) == fg_ref

    def test_counts_preserved(self, fg_ref):
        S = swap_projections(fg_ref)
        for n in range(2, 11):
            assert len(enumerate_tuples(S, "A", n)) == len(enumerate_tuples(fg_ref, "A", n))

    def test_empty(self):
        G = TupleGrammar((NonTerminal("A", 2, (1, 1)),), (), "A", F)
        assert swap_projections(G).productions == ()


class TestProjection:
    def test_image_of_everything(self, fg):
        G = build_grammar(fg)
        product, axioms = synchronize(G, universal_automaton(fg.alphabet), side=1)
        A = project_split(product, 2, axioms, fg.alphabet)
        assert accepts(A, t("h(f(a,a))"))

    def test_empty_grammar(self):
        G = TupleGrammar((NonTerminal("A", 2, (1, 1)),), (), "A", F)
        A = project_split(G, 2, ["A"], F)
        assert not A.rules


class TestRational:
    X = ("□1", "□2")

    def eval(self, bound):
        h1, h2 = Var(self.X[0]), Var(self.X[1])
        star = iterate_subst([(App("g", (h1,)), App("g", (h2,)))], self.X, bound)
        outer = subst_product([(App("f", (h1, h2)),)], self.X, star, bound)
        return subst_product(outer, self.X, [(a, a)], bound)

    def test_node_count_bound(self):
        # f(g^n a, g^n a) has 2n + 3 nodes
        assert set(self.eval(11)) == {(App("f", (g_pow(n, a), g_pow(n, a))),) for n in range(5)}
        assert set(self.eval(7)) == {(App("f", (g_pow(n, a), g_pow(n, a))),) for n in range(3)}

    def test_zeroth_power(self):
        star = iterate_subst([(App("g", (Var("□1"),)), App("g", (Var("□2"),)))], self.X, 2)
        assert (Var("□1"), Var("□2")) in star
        assert subst_product(star, self.X, [(a, a)], 2) == {(a, a)}

    def test_empty_right_operand(self):
        assert subst_product([(App("f", (Var("□1"), Var("□2"))),)], self.X, []) == frozenset()
        assert subst_product([(a,)], self.X, []) == {(a,)}

    @settings(max_examples=30, deadline=None)
    @given(st.sets(st.sampled_from([(a, a), (t("g(a)"), a), (a, t("h(a)"))])),
           st.sets(st.sampled_from([(a, a), (t("g(a)"), a), (a, t("h(a)"))])))
    def test_monotone(self, m1, m2):
        L = [(App("f", (Var("□1"), Var("□2"))),)]
        small = subst_product(L, self.X, m1)
        big = subst_product(L, self.X, m1 | m2)
        assert small <= big


def test_format_roundtrip(fg_ref):
    assert parse_grammar(format_grammar(fg_ref)) == fg_ref


@settings(max_examples=25, deadline=None)
@given(st.data())
def test_membership_equals_enumeration(fg_ref, data):
    words = sorted(enumerate_tuples(fg_ref, "A", 10), key=str)
    w = data.draw(st.sampled_from(words))
    assert contains_tuple(fg_ref, "A", w)
    assert w in enumerate_tuples(fg_ref, "A", word_size(w))
