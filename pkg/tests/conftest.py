import numpy as np
import pytest

from giantatoms.core import Topology


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture(params=list(Topology), ids=lambda t: t.value)
def topology(request):
    return request.param


def random_params(rng, omega0=100.0, lo=0.05, hi=1.95):
    """Random phases away from the exact decoupling endpoints."""
    from giantatoms.core import SystemParams

    return SystemParams(omega0, rng.uniform(lo, hi) * np.pi,
                        rng.uniform(lo, hi) * np.pi)
