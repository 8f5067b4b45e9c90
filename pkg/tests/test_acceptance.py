"""One line per exit criterion; run with -s to see them."""

import pytest

from setmaplab.acceptance import CRITERIA


@pytest.mark.parametrize("criterion", CRITERIA, ids=lambda c: c.__name__)
def test_criterion(criterion):
    res = criterion()
    print(res.line())
    assert res.passed, res.detail
