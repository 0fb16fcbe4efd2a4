import numpy as np
import pytest

from softarm import backend
from softarm.kinematics import default_geometry


@pytest.fixture(params=backend.available())
def kernel_backend(request):
    """Run the math-level tests on every backend built in this env."""
    previous = backend.active_name()
    backend.use(request.param)
    yield request.param
    backend.use(previous)


@pytest.fixture
def geometry():
    return default_geometry()


@pytest.fixture
def rng():
    return np.random.default_rng(1337)


def random_canonical_q(rng, n=3, theta_lo=0.0, theta_hi=np.pi / 2):
    q = np.empty(2 * n)
    q[0::2] = rng.uniform(-np.pi, np.pi, n)
    q[1::2] = rng.uniform(theta_lo, theta_hi, n)
    return q
