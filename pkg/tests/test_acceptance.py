"""One test per acceptance criterion; each prints a PASS/FAIL line."""
import pytest

from polywild import repro


@pytest.mark.parametrize("number", range(1, 11), ids=lambda k: f"criterion_{k}")
def test_criterion(number):
    result = repro.CRITERIA[number - 1]()
    print(result.line())
    assert result.passed, result.details
    assert result.seconds < result.limit
