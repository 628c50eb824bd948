import numpy as np
import pytest

from arm7ik import KinematicModel


@pytest.fixture
def model():
    """Unit-length canonical arm: h = 1, workspace radius 3."""
    return KinematicModel()


@pytest.fixture
def rng():
    return np.random.default_rng(0)
