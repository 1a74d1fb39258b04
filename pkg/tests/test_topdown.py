import pytest
from hypothesis import given, settings

from ratrw.automata import enumerate_language, finite_automaton, is_empty, TreeAutomaton
from ratrw.grammars import contains_tuple, enumerate_tuples
from ratrw.rewriting import Trs, reachable
from ratrw.terms import App, RankedAlphabet, ground_terms, hole, parse_term, size
from ratrw.topdown import (
    ClassVeto,
    bounded_preimages,
    build_bottomup,
    build_grammar,
    image_automaton,
    inverse_image_automaton,
    overlap_set,
    refuse_inverse_image,
)

from strategies import topdown_systems

F = RankedAlphabet.of("f/2 g/1 h/1 a/0")


def t(text):
    return parse_term(text, F)


def contexts(R):
    return [o.context for o in overlap_set(R)]


def oracle_pairs(R, bound, slack):
    return {(s, u) for s in ground_terms(R.alphabet, bound)
            for u in reachable(R, s, None, slack) if size(u) <= bound}


def grammar_pairs(G, bound):
    return set(enumerate_tuples(G, None, 2 * bound, max_component=bound))


class TestOverlapSet:
    def test_fg(self, fg):
        assert contexts(fg) == [hole(1), App("f", (hole(1), hole(2)))]

    def test_distinct_constants(self):
        assert contexts(Trs.of("a/0 b/0", [("a", "b")])) == [hole(1)]

    def test_empty(self):
        assert contexts(Trs(F)) == [hole(1)]


class TestBuild:
    def test_same_language_as_example_grammar(self, fg, fg_ref):
        assert enumerate_tuples(build_grammar(fg), None, 14) == enumerate_tuples(fg_ref, "A", 14)

    def test_empty_system_is_identity(self):
        G = build_grammar(Trs(F))
        assert grammar_pairs(G, 5) == {(s, s) for s in ground_terms(F, 5)}

    def test_constant_rule(self):
        R = Trs.of("a/0 b/0 g/1", [("a", "b")])
        G = build_grammar(R)
        assert contains_tuple(G, None, (t("a"), App("b", ())))
        assert grammar_pairs(G, 5) == oracle_pairs(R, 5, 8)

    def test_reflexive(self, fg):
        G = build_grammar(fg)
        assert all(contains_tuple(G, None, (s, s)) for s in ground_terms(F, 6))

    def test_refuses_non_topdown(self, nested_g):
        with pytest.raises(ClassVeto) as info:
            build_grammar(nested_g)
        assert info.value.witness is not None


class TestImages:
    def test_image_of_one_term(self, fg):
        A = finite_automaton(F, [t("f(g(a),g(a))")])
        assert enumerate_language(image_automaton(fg, A), 12) == {t("f(g(a),g(a))"), t("h(f(a,a))")}

    def test_empty_language(self, fg):
        A = TreeAutomaton.build(F, [], [])
        assert is_empty(image_automaton(fg, A))

    def test_empty_system(self, fgga):
        assert enumerate_language(image_automaton(Trs(F), fgga), 9) == enumerate_language(fgga, 9)


class TestBottomUp:
    def test_inverse_grammar(self, fg):
        G = build_bottomup(fg.inverse())
        assert contains_tuple(G, None, (t("h(f(a,a))"), t("f(g(a),g(a))")))

    def test_empty_system(self):
        G = build_bottomup(Trs(F))
        assert grammar_pairs(G, 4) == {(s, s) for s in ground_terms(F, 4)}

    def test_inverse_image(self, fg):
        A = finite_automaton(F, [t("f(g(a),g(a))")])
        B = inverse_image_automaton(fg.inverse(), A)
        assert t("h(f(a,a))") in enumerate_language(B, 8)


class TestNegativeControls:
    def test_nested_g_closure(self, nested_g):
        R = nested_g

        def f_pow(n, u):
            for _ in range(n):
                u = App("f", (u,))
            return u

        a = App("a", ())
        assert reachable(R, App("g", (a,)), 4) == {f_pow(n, App("g", (f_pow(n, a),))) for n in range(5)}

    def test_topdown_inverse_refused(self, fg):
        with pytest.raises(ClassVeto):
            refuse_inverse_image(fg)

    def test_bounded_preimages(self, fg):
        assert bounded_preimages(fg, [t("h(f(a,a))")], 9) == {t("h(f(a,a))"), t("f(g(a),g(a))")}
        assert t("f(g(g(a)),g(g(a)))") in bounded_preimages(fg, [t("h(h(f(a,a)))")], 9)

    def test_hstar_preimages(self, fg):
        hstar = TreeAutomaton.build(F, ["q"], [("q", "h", ("q",)), ("q", "f", ("r", "r")), ("r", "a", ())])
        targets = sorted(enumerate_language(hstar, 13), key=size)
        got = bounded_preimages(fg, targets, 13)
        # preimages of h^* f(a,a) are h^k f(g^n a, g^n a)
        want = set()
        for k in range(11):
            for n in range(6):
                u = App("f", (g_pow(n, App("a", ())), g_pow(n, App("a", ()))))
                for _ in range(k):
                    u = App("h", (u,))
                if size(u) <= 13:
                    want.add(u)
        assert got == want


def g_pow(n, u):
    for _ in range(n):
        u = App("g", (u,))
    return u


@settings(max_examples=15, deadline=None)
@given(topdown_systems())
def test_grammar_equals_oracle(R):
    assert grammar_pairs(build_grammar(R), 5) == oracle_pairs(R, 5, 11)


@settings(max_examples=15, deadline=None)
@given(topdown_systems())
def test_image_matches_oracle(R):
    seeds = sorted(ground_terms(R.alphabet, 3), key=str)[:4]
    A = finite_automaton(R.alphabet, seeds)
    want = {u for s in seeds for u in reachable(R, s, None, 11) if size(u) <= 5}
    assert enumerate_language(image_automaton(R, A), 5) == want
