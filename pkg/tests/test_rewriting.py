import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ratrw.rewriting import (
    Trs,
    explore,
    format_trs,
    parse_trs,
    reachable,
    rewrite_step,
    suffix_reachable,
    topdown_reachable,
    topdown_step_allowed,
    trace,
)
from ratrw.terms import TermError, Var, parse_term

from strategies import any_systems, ground_terms


def T(R, text, vars=()):
    return parse_term(text, R.alphabet, vars)


def successors(R, t):
    return {s for s, _ in rewrite_step(R, t)}


class TestStep:
    def test_single_root_redex(self, fg):
        assert successors(fg, T(fg, "f(g(a),g(a))")) == {T(fg, "h(f(a,a))")}

    def test_no_redex(self, fg):
        assert successors(fg, T(fg, "a")) == set()

    def test_three_redexes(self, swap_pump):
        R = swap_pump
        assert successors(R, T(R, "f(a,g(a))")) == {T(R, "f(g(a),a)"), T(R, "f(g(a),g(a))"), T(R, "f(a,g(g(a)))")}


class TestReachable:
    def test_two_steps(self, fg):
        start = T(fg, "f(g(g(a)),g(g(a)))")
        want = {start, T(fg, "h(f(g(a),g(a)))"), T(fg, "h(h(f(a,a)))")}
        assert reachable(fg, start, 5, 20) == want

    def test_zero_steps(self, fg):
        s = T(fg, "f(g(a),g(a))")
        assert reachable(fg, s, 0) == {s}

    def test_chain(self):
        R = Trs.of("g/1 a/0", [("a", "g(a)")])
        assert reachable(R, T(R, "a"), 3, 10) == {T(R, "a"), T(R, "g(a)"), T(R, "g(g(a))"), T(R, "g(g(g(a)))")}

    def test_size_prunes_intermediates(self):
        R = Trs.of("g/1 a/0", [("a", "g(a)")])
        assert reachable(R, T(R, "a"), None, 2) == {T(R, "a"), T(R, "g(a)")}


class TestTopdown:
    def test_same_as_unrestricted_on_fg(self, fg):
        start = T(fg, "f(g(g(a)),g(g(a)))")
        assert topdown_reachable(fg, start, 5, 20) == reachable(fg, start, 5, 20)

    def test_rising_step_rejected(self):
        R = Trs.of("g/1 h/1 a/0 b/0", [("a", "b"), ("g(b)", "h(a)")])
        start = T(R, "g(a)")
        assert reachable(R, start) == {T(R, s) for s in ("g(a)", "g(b)", "h(a)", "h(b)")}
        assert topdown_reachable(R, start) == {T(R, "g(a)"), T(R, "g(b)")}

    def test_variable_lhs_at_same_position(self):
        assert not topdown_step_allowed(frozenset({()}), (), (), Var("x"))
        assert topdown_step_allowed(frozenset({()}), (), (), parse_term("a"))
        assert not topdown_step_allowed(frozenset({(1,)}), (1,), (), parse_term("a"))

    def test_zero_steps(self, fg):
        s = T(fg, "f(g(a),g(a))")
        assert topdown_reachable(fg, s, 0) == {s}


class TestSuffix:
    def test_renaming_instance(self):
        R = Trs.of("f/2 a/0", [("f(x,y)", "f(y,x)")])
        assert suffix_reachable(R, T(R, "f(x,y)", "xy")) == {T(R, "f(x,y)", "xy"), T(R, "f(y,x)", "xy")}

    def test_non_renaming_matcher(self):
        R = Trs.of("f/2 a/0", [("f(x,y)", "f(y,x)")])
        assert suffix_reachable(R, T(R, "f(a,y)", "y")) == {T(R, "f(a,y)", "y")}

    def test_ground_rules_always_apply(self):
        R = Trs.of("g/1 h/1 a/0", [("a", "g(a)")])
        assert suffix_reachable(R, T(R, "h(a)"), None, 4) == {T(R, "h(a)"), T(R, "h(g(a))"), T(R, "h(g(g(a)))")}


class TestFormat:
    def test_roundtrip(self, fg):
        assert parse_trs(format_trs(fg)) == fg

    def test_missing_alphabet(self):
        with pytest.raises(TermError):
            parse_trs("rule: a -> a\n")

    def test_unknown_symbol(self):
        with pytest.raises(TermError):
            parse_trs("alphabet: a/0\nrule: a -> b\n")


@settings(max_examples=40, deadline=None)
@given(any_systems(), st.data())
def test_oracles_replay_and_nest(R, data):
    s = data.draw(ground_terms(R.alphabet, max_leaves=3))
    parents = explore(R, s, 3, 10)
    for target in parents:
        u = s
        for _, step in trace(parents, target):
            u = step.replay(R, u)
        assert u == target
    assert suffix_reachable(R, s, 3, 10) <= set(parents)
    assert topdown_reachable(R, s, 3, 10) <= set(parents)
