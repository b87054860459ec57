import math

import numpy as np
import pytest

from plateau import moving_planes as MP
from plateau import sampling as S


@pytest.fixture(scope="module")
def hits(unit_catenoid):
    return MP.cast_rays(unit_catenoid)


@pytest.mark.parametrize("t", [0.2, 0.5, 0.9])
def test_slope_matches_sech(unit_catenoid, t):
    res = MP.slope_bound(unit_catenoid, t, 1e-3 * unit_catenoid.scale)
    assert not res.empty
    assert res.max_slope == pytest.approx(1 / math.cosh(t), abs=0.01)


def test_slope_empty_band(unit_catenoid):
    assert MP.slope_bound(unit_catenoid, 5.0, 1e-3).empty


def test_graph_check(unit_catenoid, caty_mesh):
    assert MP.graph_check(unit_catenoid, 0.0)
    assert not MP.graph_check(unit_catenoid, -1.0)
    assert MP.graph_check(caty_mesh, 0.0)


def test_exact_symmetry_at_zero(hits):
    res = MP.reflect_compare(hits, 0.0)
    assert res.order_ok
    assert res.reflect_residual < 1e-9 * hits.scale


@pytest.mark.parametrize("t", [0.1 * k for k in range(1, 10)])
def test_order_holds_above_waist(hits, t):
    res = MP.reflect_compare(hits, t)
    assert res.order_ok and res.reflect_residual > 0


def test_order_fails_below_waist(hits):
    assert not MP.reflect_compare(hits, -0.1).order_ok


@pytest.mark.parametrize("s", [0.0, 0.1, 0.25, -0.2])
def test_detect_symmetry_plane(unit_catenoid, s):
    mesh = unit_catenoid.with_vertices(unit_catenoid.vertices + [0.0, 0.0, s])
    plane = MP.detect_symmetry_plane(mesh)
    assert plane is not None
    assert plane.t_star == pytest.approx(s, abs=1e-3)


def test_no_symmetry_plane_for_tilted_disks():
    assert MP.detect_symmetry_plane(S.tilted_disks()) is None


def test_sweep_and_csv(tmp_path, unit_catenoid):
    states = MP.sweep(unit_catenoid, [0.2, 0.5], n=64)
    assert all(s.p1_ok and s.p2_ok and s.p3_ok and s.p4_ok for s in states)
    path = tmp_path / "sweep.csv"
    MP.write_sweep_csv(states, path)
    assert path.read_text().splitlines()[0].startswith("t,max_slope,order_ok")


def test_reflection_residual_tracks_translation(unit_catenoid):
    """Independent route: reflecting across t maps the waist to 2t, so the residual grows with t."""
    hits = MP.cast_rays(unit_catenoid, n=64)
    r = [MP.reflect_compare(hits, t).reflect_residual for t in (0.05, 0.1, 0.2)]
    assert r[0] < r[1] < r[2]
    assert np.isclose(r[0], 0.1, atol=0.02)
