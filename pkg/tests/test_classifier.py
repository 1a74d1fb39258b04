from hypothesis import assume, given, settings

from ratrw.classifier import (
    BOTTOMUP,
    CLASSES,
    LHS_IN_RHS,
    PREFIX,
    RHS_IN_LHS,
    SUFFIX,
    TOPDOWN,
    TuringMachine,
    classify,
    critical_overlaps,
    encode_turing_machine,
    parse_tm,
    witness_is_genuine,
)
from ratrw.checks import data_text
from ratrw.rewriting import Trs
from ratrw.terms import RankedAlphabet, parse_term, variables

from strategies import any_systems

F = RankedAlphabet.of("f/2 g/1 h/1 a/0 b/0")


def t(text):
    return parse_term(text, F, ("x", "y", "x'", "y'", "x''"))


class TestOverlaps:
    def test_fg_overlap(self):
        [ov] = critical_overlaps(t("h(f(x,y))"), t("f(g(x'),g(y'))"))
        assert ov.kind == LHS_IN_RHS and ov.position == (1,)
        assert dict(ov.unifier) == {"x": t("g(x')"), "y": t("g(y')")}

    def test_distinct_constants(self):
        assert critical_overlaps(t("a"), t("b")) == []

    def test_both_directions(self):
        [ov] = critical_overlaps(t("g(f(x,y))"), t("f(x',y')"))
        assert ov.kind == LHS_IN_RHS
        [ov] = critical_overlaps(t("g(x)"), t("h(g(x''))"))
        assert ov.kind == RHS_IN_LHS and ov.position == (1,)


class TestClassify:
    def test_fg_is_topdown_only(self, fg):
        assert classify(fg).classes == {TOPDOWN}

    def test_inverse_is_bottomup_only(self, fg):
        assert classify(fg.inverse()).classes == {BOTTOMUP}

    def test_swap_pump_is_suffix(self, swap_pump):
        assert SUFFIX in classify(swap_pump)

    def test_nested_g_not_topdown(self, nested_g):
        assert TOPDOWN not in classify(nested_g)

    def test_empty_system(self):
        assert classify(Trs(F)).classes == set(CLASSES)

    def test_report_lists_witnesses(self, fg):
        text = classify(fg).format()
        assert "TopDown: yes" in text and "BottomUp: no  -- " in text


class TestTuringMachine:
    def test_right_move(self):
        R = encode_turing_machine(TuringMachine(("p", "q"), ("A", "B"), (("p", "A", "q", "B", "+"),)))
        assert [str(r) for r in R.rules] == ["p(x,A(y)) -> q(B(x),y)"]

    def test_left_move(self):
        R = encode_turing_machine(TuringMachine(("p", "q"), ("A", "B", "C"), (("p", "A", "q", "B", "-"),)))
        assert "p(C(x),A(y)) -> q(x,C(B(y)))" in {str(r) for r in R.rules}

    def test_no_transitions(self):
        R = encode_turing_machine(TuringMachine(("p",), ("A",), ()))
        assert not R.rules and classify(R).classes == set(CLASSES)

    def test_one_step_machine(self):
        report = classify(encode_turing_machine(parse_tm(data_text("one_step.tm"))))
        assert report.classes == {PREFIX}


@settings(max_examples=60, deadline=None)
@given(any_systems(max_rules=3))
def test_witnesses_are_genuine(R):
    report = classify(R)
    for name, ov in report.witnesses.items():
        assert witness_is_genuine(name, ov)


@settings(max_examples=60, deadline=None)
@given(any_systems(max_rules=3))
def test_topdown_bottomup_duality(R):
    assume(all(set(variables(r.lhs)) == set(variables(r.rhs)) for r in R.rules))
    assert (TOPDOWN in classify(R)) == (BOTTOMUP in classify(R.inverse()))


@settings(max_examples=40, deadline=None)
@given(any_systems(max_rules=3))
def test_ground_systems_are_suffix(R):
    ground = tuple(r for r in R.rules if not variables(r.lhs) and not variables(r.rhs))
    assert SUFFIX in classify(Trs(R.alphabet, ground))
