import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ratrw.terms import (
    App,
    RankedAlphabet,
    TermError,
    Var,
    canonical,
    format_term,
    hole,
    is_prefix,
    match,
    parse_term,
    plug,
    positions,
    replace_at,
    size,
    subterm_at,
    substitute,
    to_context,
    unify,
    variables,
)

from strategies import ALPHABET, ground_terms, linear_terms

F = RankedAlphabet.of("f/2 g/1 h/1 a/0")
x, y = Var("x"), Var("y")
a = App("a", ())


def t(text, vars=("x", "y", "x'", "y'")):
    return parse_term(text, F, vars)


class TestParse:
    def test_nested(self):
        assert t("f(g(x),g(y))") == App("f", (App("g", (x,)), App("g", (y,))))

    def test_constant(self):
        assert parse_term("a", F) == a

    def test_arity_mismatch(self):
        with pytest.raises(TermError):
            parse_term("f(a)", F)

    def test_holes_rejected_in_alphabets(self):
        with pytest.raises(TermError):
            RankedAlphabet.of("□1/0")

    @given(ground_terms())
    def test_roundtrip(self, s):
        assert parse_term(format_term(s), ALPHABET) == s


class TestMatchUnify:
    def test_match_ground(self):
        assert match(t("f(x,y)"), t("f(g(a),a)")) == {"x": t("g(a)"), "y": a}

    def test_match_open_subject(self):
        assert match(t("f(x,y)"), t("f(g(x'),g(y'))")) == {"x": t("g(x')"), "y": t("g(y')")}

    def test_match_inert_variable(self):
        assert match(t("g(f(x,y))"), t("g(x')")) is None

    def test_unify(self):
        s = unify(t("f(x,y)"), t("f(g(x'),g(y'))"))
        assert substitute(t("f(x,y)"), s) == substitute(t("f(g(x'),g(y'))"), s)
        assert s["x"] == t("g(x')")

    def test_occurs_check(self):
        assert unify(x, t("g(x)")) is None

    def test_identical_constants(self):
        assert unify(a, a) == {}

    @given(linear_terms(), ground_terms())
    def test_match_substitute_roundtrip(self, p, s):
        sigma = match(p, s)
        if sigma is not None:
            assert substitute(p, sigma) == s

    @given(linear_terms(), linear_terms())
    def test_unify_sound(self, s, u):
        u = substitute(u, {v: Var(v + "'") for v in variables(u)})
        sigma = unify(s, u)
        if sigma is not None:
            assert substitute(s, sigma) == substitute(u, sigma)


class TestContexts:
    def test_simple(self):
        assert to_context(t("f(x,y)")) == (App("f", (hole(1), hole(2))), ["x", "y"])

    def test_ground(self):
        assert to_context(a) == (a, [])

    def test_left_to_right(self):
        c, names = to_context(t("f(g(y),x)"))
        assert c == App("f", (App("g", (hole(1),)), hole(2)))
        assert names == ["y", "x"]

    @given(linear_terms())
    def test_plug_back(self, s):
        c, names = to_context(s)
        assert plug(c, [Var(n) for n in names]) == s
        assert to_context(c)[0] == c


class TestPositions:
    def test_subterm_at(self):
        assert subterm_at(t("h(f(x,y))"), [1]) == t("f(x,y)")

    def test_replace_at(self):
        assert replace_at(t("f(a,a)"), [2], t("g(a)")) == t("f(a,g(a))")

    def test_positions(self):
        assert set(positions(t("f(g(a),a)"))) == {(), (1,), (1, 1), (2,)}

    def test_prefix_order_exhaustive(self):
        ps = [p for n in range(5) for p in itertools.product((1, 2), repeat=n)]
        for p, q in itertools.product(ps, repeat=2):
            if is_prefix(p, q) and is_prefix(q, p):
                assert p == q
        for p, q, r in itertools.product(ps[:15], repeat=3):
            if is_prefix(p, q) and is_prefix(q, r):
                assert is_prefix(p, r)

    @given(ground_terms())
    def test_size_is_node_count(self, s):
        assert size(s) == len(positions(s))


def test_canonical_renaming():
    assert canonical(t("f(y,x)")) == canonical(t("f(x,y)"))
    assert canonical(t("f(y,x)")) == App("f", (Var("x1"), Var("x2")))
