import numpy as np
import pytest

from risambc import _backend, model
from risambc.specfun import gauss_laguerre


@pytest.fixture(scope="session")
def scenario():
    return model.Scenario()


@pytest.fixture(scope="session")
def dp(scenario):
    return model.derive(scenario)


@pytest.fixture(scope="session")
def rule():
    return gauss_laguerre(300)


@pytest.fixture(params=sorted(_backend.available()))
def kernels(request):
    """Each importable kernel module in turn."""
    return _backend.available()[request.param]


def rel(a, b):
    return abs(a - b) / abs(b)
