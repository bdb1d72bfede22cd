"""One test per acceptance criterion; each prints its pass/fail line."""

import pytest

from pcpforge import acceptance


@pytest.mark.parametrize("number", range(1, 14))
def test_criterion(number):
    outcome = getattr(acceptance, f"criterion_{number}")()
    print(outcome.line())
    assert outcome.ok, outcome.line()
