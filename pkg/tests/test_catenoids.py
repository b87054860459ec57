import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from plateau import catenoids as C
from plateau.repro import oracle_census, oracle_tangency_ratio

# [DERIVED] roots for R = 1, d = 0.4 from the dense-scan brentq oracle, frozen.
FROZEN_C = (0.15796239721068095, 0.910737994273788)
FROZEN_LAM = (0.31031135296980944, 0.44701769274182523)
FROZEN_RATIO = 0.6627434193491816


def test_h0_constants():
    assert abs(math.sinh(C.H0) - 1 / math.sqrt(3)) < 1e-15
    assert abs(C.DISK_FACTOR - 2 / math.sqrt(3)) < 1e-15
    assert abs(math.cosh(C.H0) - C.DISK_FACTOR) < 1e-12


def test_census_figure_case():
    census = C.enumerate_spanning_surfaces(1.0, 0.4)
    assert len(census.entries) == 5
    assert [e.c for e in census.catenoids] == pytest.approx(FROZEN_C, abs=1e-12)
    assert [e.lam for e in census.y_catenoids] == pytest.approx(FROZEN_LAM, abs=1e-12)
    assert all(e.residual < 1e-10 for e in census.catenoids + census.y_catenoids)
    assert [e.branch for e in census.catenoids] == ["skinny", "fat"]


def test_far_circles_only_disks():
    census = C.enumerate_spanning_surfaces(1.0, 2.0)
    assert len(census.entries) == 1 and census.entries[0].kind == "disk_pair"


def test_frozen_values_match_oracle():
    oracle = oracle_census(1.0, 0.4)
    assert oracle["catenoid"] == pytest.approx(FROZEN_C, abs=1e-12)
    assert oracle["y_catenoid"] == pytest.approx(FROZEN_LAM, abs=1e-12)
    assert oracle_tangency_ratio() == pytest.approx(FROZEN_RATIO, abs=1e-14)


def test_critical_ratio():
    assert abs(C.critical_ratio() - FROZEN_RATIO) < 1e-8
    census = C.enumerate_spanning_surfaces(1.0, C.critical_ratio())
    assert len(census.catenoids) == 1 and census.at_catenoid_tangency
    # the glued disk costs height, so Y-catenoids stop existing earlier
    assert C.critical_ratio(C.H0) < C.critical_ratio()


@settings(max_examples=40, deadline=None)
@given(st.floats(min_value=0.5, max_value=5.0), st.floats(min_value=0.02, max_value=0.95))
def test_counts_agree_with_scan_oracle(R, ratio):
    d = ratio * R
    ratio_c, ratio_y = C.critical_ratio(), C.critical_ratio(C.H0)
    if min(abs(ratio - ratio_c), abs(ratio - ratio_y)) < 1e-6:
        return  # too close to tangency for a sign-change scan
    census = C.enumerate_spanning_surfaces(R, d)
    oracle = oracle_census(R, d)
    assert len(census.catenoids) == len(oracle["catenoid"])
    assert len(census.y_catenoids) == len(oracle["y_catenoid"])
    assert np.allclose([e.c for e in census.catenoids], oracle["catenoid"], atol=1e-9 * R)
    assert np.allclose([e.lam for e in census.y_catenoids], oracle["y_catenoid"], atol=1e-9 * R)


@pytest.mark.parametrize("R,d", [(0.0, 1.0), (1.0, -0.1)])
def test_invalid_input(R, d):
    with pytest.raises(ValueError):
        C.solve_catenoid(R, d)


def test_band_area_matches_quadrature():
    c, d = 0.8, 0.5
    z = np.linspace(-d, d, 20001)
    integrand = 2 * np.pi * c * np.cosh(z / c) ** 2
    assert C.catenoid_band_area(c, d) == pytest.approx(np.trapezoid(integrand, z), rel=1e-7)
