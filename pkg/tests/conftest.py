import numpy as np
import pytest

from hitchinlab.painleve import solve_connection
from hitchinlab.fiducial import build_family


@pytest.fixture(scope="session")
def profile():
    return solve_connection()


@pytest.fixture(scope="session")
def families(profile):
    return {t: build_family(t, profile) for t in (1.0, 2.0, 4.0, 8.0, 16.0)}


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240811)
