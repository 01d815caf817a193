import json

import pytest

from kmeis.cartan import validate_gcm
from kmeis.special import PrecisionContext

A2 = [[2, -1], [-1, 2]]
COUNTEREXAMPLE = [[2, -1], [-5, 2]]
HYPERBOLIC_33 = [[2, -3], [-3, 2]]
RANK2_23 = [[2, -2], [-3, 2]]
RANK3_ALL2 = [[2, -2, -2], [-2, 2, -2], [-2, -2, 2]]


@pytest.fixture
def a2():
    return validate_gcm(A2)


@pytest.fixture
def counterexample():
    return validate_gcm(COUNTEREXAMPLE)


@pytest.fixture
def hyperbolic():
    return validate_gcm(HYPERBOLIC_33)


@pytest.fixture
def rank2_23():
    return validate_gcm(RANK2_23)


@pytest.fixture
def rank3():
    return validate_gcm(RANK3_ALL2)


@pytest.fixture(params=[HYPERBOLIC_33, RANK2_23, RANK3_ALL2], ids=["a3b3", "a3b2", "rank3"])
def test_system(request):
    """The three infinite-type systems used for oracle and norm checks."""
    return validate_gcm(request.param)


@pytest.fixture
def ctx():
    return PrecisionContext(digits=30)


@pytest.fixture
def write_config(tmp_path):
    """Write a job configuration to a temporary file and return its path."""

    def _write(payload, name="job.json"):
        path = tmp_path / name
        path.write_text(json.dumps(payload), encoding="utf-8")
        return str(path)

    return _write
