import math

import numpy as np
import pytest

from plateau import catenoids, sampling
from plateau.catenoids import CatenoidSolution


def fat(kind, R=1.0, d=0.4):
    census = catenoids.enumerate_spanning_surfaces(R, d)
    return [e for e in census.entries if e.kind == kind and getattr(e, "branch", None) == "fat"][0]


@pytest.fixture(scope="session")
def cat_mesh():
    return sampling.sample_surface(fat("catenoid"), 32, 16)


@pytest.fixture(scope="session")
def caty_mesh():
    return sampling.sample_surface(fat("y_catenoid"), 32, 16)


@pytest.fixture(scope="session")
def unit_catenoid():
    d = 1.2
    return sampling.sample_surface(CatenoidSolution(c=1.0, d=d, R=math.cosh(d), branch="fat"), 64, 200)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
