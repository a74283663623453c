import numpy as np
import pytest

from entwave.gas import GasParams, solve_endstates
from entwave.profile import solve_selfsimilar


@pytest.fixture(scope="session")
def gas():
    return GasParams(gamma=5.0 / 3.0, mu=0.15, lam=0.0, kappa=0.3)


@pytest.fixture(scope="session")
def ends():
    # rho_plus chosen so delta is close to 0.05
    return solve_endstates(1.0, 1.0, 1.02532)


@pytest.fixture(scope="session")
def profile(ends, gas):
    return solve_selfsimilar(ends, gas)


@pytest.fixture()
def rng():
    return np.random.default_rng(20240811)
