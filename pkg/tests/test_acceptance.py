"""Acceptance criteria, each at its stated tolerance; prints one PASS/FAIL line per criterion."""

import pytest

from plateau import repro


@pytest.mark.parametrize("number", sorted(repro.CRITERIA))
def test_criterion(number):
    result = repro.run_check(number)
    print(result.line())
    print(f"    details: {result.details}")
    assert result.passed, result.details
