"""Acceptance suite: one PASS/FAIL line per criterion, at the stated bounds and time limits."""

import pytest

from ratrw.checks import CRITERIA, AcceptanceConfig, run_criterion

# Criterion 9 asks for n <= 3 at size 11, but with node-count size f(g^4 a, g^4 a)
# has exactly 11 nodes, so the literal check cannot hold (see the decisions ledger).
KNOWN_FAILURES = {9: "bound 11 admits n = 4 under node-count size"}


def _param(number, title):
    marks = []
    if number in KNOWN_FAILURES:
        marks.append(pytest.mark.xfail(reason=KNOWN_FAILURES[number], strict=True))
    if number in (2, 6):
        marks.append(pytest.mark.slow)
    return pytest.param(number, id=f"c{number}-{title.replace(' ', '-')}", marks=marks)


@pytest.mark.parametrize("number", [_param(n, title) for n, title, _, _ in CRITERIA])
def test_criterion(number, capsys):
    result = run_criterion(number, AcceptanceConfig())
    with capsys.disabled():
        print("\n" + result.line())
    assert result.passed, result.detail
    assert result.in_time, f"took {result.seconds:.1f}s, limit {result.limit:.0f}s"
