import pytest

from ratrw.automata import TreeAutomaton, enumerate_language, is_empty
from ratrw.grammars import contains_tuple, enumerate_tuples
from ratrw.rewriting import Trs, reachable, suffix_reachable
from ratrw.suffix import (
    bridge_violations,
    build_suffix_grammar,
    image_automaton_suffix,
    saturate,
    to_state_system,
    two_phase_reachable,
)
from ratrw.terms import App, RankedAlphabet, ground_terms, parse_term, size
from ratrw.topdown import ClassVeto

PUMP = Trs.of("g/1 a/0", [("a", "g(a)")])
SWAP = Trs.of("f/2 a/0", [("f(x,y)", "f(y,x)")])


def pairs(G, bound):
    return set(enumerate_tuples(G, None, 2 * bound, max_component=bound))


def oracle(R, bound, slack):
    return {(s, u) for s in ground_terms(R.alphabet, bound)
            for u in reachable(R, s, None, slack) if size(u) <= bound}


class TestStateSystem:
    def test_pump(self):
        S = to_state_system(PUMP)
        assert [str(r) for r in S.rules()] == ["a -> l1.e", "r1.e -> g(r1.1)", "r1.1 -> a", "l1.e -> r1.e"]

    def test_swap_bookkeeping(self):
        S = to_state_system(SWAP)
        nu = {s.name: s.nu for s in S.states}
        assert nu["l1.e"] == ("x", "y") and nu["r1.e"] == ("y", "x")
        assert "f(l1.1(x),l1.2(y)) -> l1.e(x,y)" in {str(r) for r in S.rules()}
        assert S.bridges == (("l1.e", "r1.e", (1, 0)),)

    def test_empty(self):
        S = to_state_system(Trs(RankedAlphabet.of("a/0")))
        assert not S.rules()


class TestSaturation:
    def test_pump(self):
        T = saturate(to_state_system(PUMP))
        assert ("l1.e", "r1.e", ()) in T.eq
        # the produced constant cancels against the consumed one
        assert ("r1.1", "l1.e", ()) in T.eq
        assert all((s.name, s.name, ()) in T.eq for s in T.system.states)

    def test_empty(self):
        T = saturate(to_state_system(Trs(RankedAlphabet.of("a/0"))))
        assert T.eq == frozenset()

    def test_swap_cancellation(self):
        T = saturate(to_state_system(SWAP))
        assert {("r1.1", "l1.1", (0,)), ("r1.2", "l1.2", (0,)), ("r1.e", "l1.e", (1, 0))} <= T.eq

    def test_bridge_property(self, swap_pump):
        assert bridge_violations(saturate(to_state_system(swap_pump)), 5) == []

    def test_two_phase(self, swap_pump):
        T = saturate(to_state_system(swap_pump))
        for s in ground_terms(swap_pump.alphabet, 5):
            want = {u for u in suffix_reachable(swap_pump, s, None, 7) if size(u) <= 5}
            got = {u for u in two_phase_reachable(T, s, 7) if size(u) <= 5}
            assert got == want


class TestGrammar:
    def test_pairs(self, swap_pump):
        G = build_suffix_grammar(swap_pump)
        t = lambda text: parse_term(text, swap_pump.alphabet)
        assert contains_tuple(G, None, (t("f(a,g(a))"), t("f(g(a),a)")))
        assert contains_tuple(G, None, (t("a"), t("g(g(a))")))
        assert all(contains_tuple(G, None, (s, s)) for s in ground_terms(swap_pump.alphabet, 8))

    def test_oracle_at_6(self, swap_pump):
        assert pairs(build_suffix_grammar(swap_pump), 6) == oracle(swap_pump, 6, 12)

    def test_ground_system(self):
        R = Trs.of("f/2 g/1 a/0 b/0", [("a", "b"), ("g(b)", "a")])
        assert pairs(build_suffix_grammar(R), 6) == oracle(R, 6, 10)

    def test_empty_system(self):
        F = RankedAlphabet.of("f/2 g/1 a/0")
        assert pairs(build_suffix_grammar(Trs(F)), 5) == {(s, s) for s in ground_terms(F, 5)}

    def test_refuses_non_suffix(self, fg):
        with pytest.raises(ClassVeto):
            build_suffix_grammar(fg)

    def test_nonterminal_cap(self, swap_pump):
        with pytest.raises(Exception, match="non-terminal"):
            build_suffix_grammar(swap_pump, cap=5)


class TestImages:
    def test_forward(self, swap_pump, faa):
        got = enumerate_language(image_automaton_suffix(swap_pump, faa, "forward"), 8)
        g = lambda n: parse_term("a") if n == 0 else App("g", (g(n - 1),))
        assert got == {App("f", (g(m), g(n))) for m in range(6) for n in range(6) if m + n + 3 <= 8}

    def test_inverse(self, swap_pump, faa):
        got = enumerate_language(image_automaton_suffix(swap_pump, faa, "inverse"), 8)
        assert got == {parse_term("f(a,a)", swap_pump.alphabet)}

    def test_empty_language(self, swap_pump):
        A = TreeAutomaton.build(swap_pump.alphabet, [], [])
        assert is_empty(image_automaton_suffix(swap_pump, A))

    def test_empty_system(self, faa):
        R = Trs(faa.alphabet)
        assert enumerate_language(image_automaton_suffix(R, faa), 8) == enumerate_language(faa, 8)
