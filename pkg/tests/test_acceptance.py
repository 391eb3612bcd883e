"""Acceptance criteria 1-11 at full sample sizes, one printed line each."""

import pytest

from herlat.acceptance import CRITERIA


@pytest.mark.slow
@pytest.mark.parametrize("criterion", CRITERIA, ids=[f"criterion_{k}" for k in range(1, 12)])
def test_acceptance(criterion, capsys):
    res = criterion(False)
    with capsys.disabled():
        print("\n" + res.line())
    assert res.passed, res.line()
