import numpy as np
import pytest

from ringchain import trig_profile, uniform_profile


@pytest.fixture
def uniform():
    return uniform_profile(L=1.0)


@pytest.fixture
def cos001():
    return trig_profile(L=1.0, x_cos={1: 0.01})


@pytest.fixture
def cos01():
    return trig_profile(L=1.0, x_cos={1: 0.1})


@pytest.fixture
def bump():
    return trig_profile(
        L=1.0,
        x_cos={1: 0.002, 2: 0.001},
        x_sin={3: 0.0003},
        v_cos={2: 0.002},
        v_sin={1: 0.005},
    )


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
