import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from expectile_es import (  # noqa: E402
    Bernoulli,
    BetaPower,
    Exponential1,
    FiniteLossModel,
    Koenker,
    Pareto,
    Uniform01,
)

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

PARAMETRIC = {
    "uniform01": Uniform01(),
    "exponential1": Exponential1(),
    "beta_power2": BetaPower(2.0),
    "beta_power05": BetaPower(0.5),
    "koenker": Koenker(),
    "pareto2": Pareto(2.0),
    "pareto3": Pareto(3.0),
}

# one representative per parametric kind
SIX_KINDS = {
    "uniform01": Uniform01(),
    "bernoulli": Bernoulli(0.3),
    "beta_power": BetaPower(2.0),
    "exponential1": Exponential1(),
    "koenker": Koenker(),
    "pareto": Pareto(2.0),
}


@pytest.fixture(params=sorted(PARAMETRIC), scope="module")
def parametric(request):
    return request.param, PARAMETRIC[request.param]


@st.composite
def finite_models(draw, max_atoms=12, lo=-5.0, hi=5.0):
    n = draw(st.integers(1, max_atoms))
    values = draw(
        st.lists(st.floats(lo, hi, allow_nan=False), min_size=n, max_size=n)
    )
    weights = draw(st.lists(st.floats(0.05, 1.0), min_size=n, max_size=n))
    w = np.asarray(weights)
    return FiniteLossModel(values, w / w.sum())


levels = st.floats(1e-4, 0.5)


def random_model(rng, max_atoms=12):
    n = int(rng.integers(1, max_atoms + 1))
    return FiniteLossModel(rng.uniform(0.0, 1.0, n), rng.dirichlet(np.ones(n)))
