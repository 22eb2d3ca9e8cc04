import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from beltrami_knots.geometry import make_knot_spec

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

PQ = [(1, 1), (2, 3), (3, 2), (2, 5)]
KS = [-2, -1, 0, 1, 2]
FAMILY = [(p, q, k) for p, q in PQ for k in KS]


@pytest.fixture
def trefoil():
    return make_knot_spec(2, 3, 0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
