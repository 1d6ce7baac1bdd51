import numpy as np
import pytest
from hypothesis import settings

from anetf.kernels import available_backends
from anetf.scenario import load_scenario

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture(params=sorted(available_backends()))
def backend(request):
    """Each importable kernel backend in turn."""
    return available_backends()[request.param]


@pytest.fixture(scope="session")
def fig5():
    return load_scenario("fig5")


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240611)
