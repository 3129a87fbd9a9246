"""Acceptance criteria at their stated budgets and tolerances.

Each test prints one ``[PASS]``/``[FAIL]`` line. The statistical checks
(7 to 12) take several minutes together.
"""

import pytest

from heavyhex.harness.acceptance import CHECKS


@pytest.mark.parametrize("number", sorted(CHECKS))
def test_criterion(number, capsys):
    check = CHECKS[number]()
    with capsys.disabled():
        print("\n" + check.line())
    assert check.passed, check.detail
