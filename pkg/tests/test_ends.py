import math

import numpy as np
import pytest

from plateau import ends as EN
from plateau import pipelines, sampling
from plateau.catenoids import CatenoidSolution

from conftest import fat


def long_catenoid(c=1.0, d=4.0, n=64):
    return sampling.sample_surface(CatenoidSolution(c=c, d=d, R=c * math.cosh(d / c), branch="fat"), n, n)


@pytest.fixture(scope="module")
def cat_far():
    return long_catenoid()


def test_catenoid_growth_rates(cat_far):
    fits, rep = pipelines.ends_report(cat_far)
    assert fits[0].a == pytest.approx(1.0, abs=0.01)
    assert fits[1].a == pytest.approx(-1.0, abs=0.01)
    assert abs(rep["balancing"]["sum_a"]) < 0.02
    assert rep["balancing"]["flux_ok"]
    # the profile arccosh(r) = log r + log 2 + O(r^-2)
    assert fits[0].b == pytest.approx(math.log(2.0), abs=0.02)


def test_scaling(cat_far):
    fit = EN.fit_end(long_catenoid(c=2.0, d=8.0), side=+1)
    assert fit.a == pytest.approx(2.0, abs=0.02)


def test_translation_invariance(cat_far):
    shift = np.array([0.3, -0.2, 0.0])
    a = EN.fit_end(cat_far, side=+1)
    b = EN.fit_end(cat_far.with_vertices(cat_far.vertices + shift), side=+1, center=shift)
    assert abs(a.a - b.a) < 1e-10 and abs(a.b - b.b) < 1e-10


def test_flat_end():
    fit = EN.fit_end(sampling.flat_disk(5.0, 64, z=0.7))
    assert abs(fit.a) < 1e-10
    assert fit.b == pytest.approx(0.7, abs=1e-10)


def test_annulus_too_thin(cat_far):
    with pytest.raises(EN.AnnulusTooThin):
        EN.fit_end(cat_far, (10.0, 15.0), side=+1)


def test_balancing_needs_two():
    with pytest.raises(ValueError):
        EN.check_end_balancing([EN.fit_end(sampling.flat_disk(5.0, 64))])
