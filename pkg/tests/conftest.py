import numpy as np
import pytest

from mrio_footprint import fixtures


@pytest.fixture(scope="session")
def account_357():
    """Shared 3x5 fixture account (seed 7) for read-only tests."""
    return fixtures.fixture(3, 5, 7)


@pytest.fixture()
def rng():
    return np.random.default_rng(20120101)
