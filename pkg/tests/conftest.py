import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

import gynibell as gb

RUN_SLOW = bool(os.environ.get("GYNIBELL_SLOW"))

requires_slow = pytest.mark.skipif(
    not RUN_SLOW, reason="long-running; set GYNIBELL_SLOW=1 to enable"
)


@pytest.fixture(scope="session")
def gyni_games():
    """GYNI games with the parity promise, N = 2..6."""
    return {n: gb.gyni_expression(n) for n in range(2, 7)}


@pytest.fixture(scope="session")
def ns_optima(gyni_games):
    """No-signaling optima for the parity GYNI family, N = 3..6 (cached:
    several invariant tests and acceptance criteria share them)."""
    return {n: gb.ns_max(gyni_games[n].expression) for n in range(3, 7)}


@pytest.fixture(scope="session")
def tobl_result():
    return gb.tobl_max(gb.gyni_sum_expression(3))
