import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from plateau import sampling as S
from plateau import verify as V
from plateau.catenoids import CatenoidSolution
from plateau.mesh import VertexLabel

from conftest import fat


def test_flat_y_is_exact():
    stats = V.dihedral_angles_along_triples(S.flat_y_cone(1.0, 8))
    assert stats.max_dev < 1e-12
    assert stats.mean == pytest.approx(120.0, abs=1e-12)


@pytest.mark.parametrize("method", ["weak", "face"])
def test_unequal_y(method):
    stats = V.dihedral_angles_along_triples(S.flat_y_cone(1.0, 8, angles=(0.0, 90.0, 225.0)), method=method)
    assert sorted(set(np.round(stats.deviations, 9))) == [15.0, 30.0]


def test_weak_conormals_beat_face_planes_on_curved_sheets(caty_mesh):
    weak = V.dihedral_angles_along_triples(caty_mesh)
    face = V.dihedral_angles_along_triples(caty_mesh, method="face")
    assert weak.max_dev < 1.0 < face.max_dev


def test_no_triples():
    with pytest.raises(V.NoTripleEdges):
        V.dihedral_angles_along_triples(S.flat_disk(1.0, 8))
    with pytest.raises(V.NoTPoints):
        V.t_angle_stats(S.flat_disk(1.0, 8))


def test_t_angles_exact():
    stats = V.t_angle_stats(S.t_cone(1.0, 3, 3))
    assert np.allclose(stats.angles, V.T_ANGLE_DEG, atol=1e-9)


@pytest.mark.parametrize(
    "builder,point,expected",
    [
        (lambda: S.flat_disk(1.0, 32), (0.0, 0.0, 0.0), 1.0),
        (lambda: S.flat_y_cone(1.0, 8), (0.0, 0.0, 0.0), 1.5),
        (lambda: S.t_cone(1.0, 4, 4), (0.0, 0.0, 0.0), V.T_DENSITY),
    ],
)
def test_density_of_cones(builder, point, expected):
    mesh = builder()
    for row in V.density(mesh, point, [0.1, 0.2, 0.3]):
        assert row["theta"] == pytest.approx(expected, abs=1e-9)
        assert not row["exceeds_mesh"]


@settings(max_examples=30, deadline=None)
@given(
    st.floats(min_value=-0.6, max_value=0.6),
    st.floats(min_value=-0.6, max_value=0.6),
    st.floats(min_value=-0.3, max_value=0.3),
    st.floats(min_value=0.01, max_value=0.8),
)
def test_ball_area_of_plane_is_disk_area(x, y, z, r):
    """Independent route: a ball meets a plane in a disk of radius sqrt(r^2 - z^2)."""
    mesh = S.flat_disk(3.0, 24)
    expected = math.pi * max(r * r - z * z, 0.0)
    assert V.ball_area(mesh, (x, y, z), r) == pytest.approx(expected, abs=1e-12)


def test_density_flags_balls_past_the_mesh():
    rows = V.density(S.flat_disk(1.0, 16), (0.0, 0.0, 0.0), [2.0])
    assert rows[0]["exceeds_mesh"]


@pytest.mark.parametrize("d", [0.5, 1.0, 1.5])
def test_catenoid_flux(d):
    mesh = S.sample_surface(CatenoidSolution(c=1.0, d=d, R=math.cosh(d), branch="fat"), 64, 200)
    loops = mesh.boundary_loops
    fluxes = [V.flux(mesh, i) for i in range(len(loops))]
    top = max(range(len(loops)), key=lambda i: mesh.vertices[loops[i], 2].mean())
    assert fluxes[top][2] == pytest.approx(2 * math.pi, rel=0.02)
    assert np.linalg.norm(np.sum(fluxes, axis=0)) < 1e-12
    assert np.allclose(V.flux(mesh, loops[top][::-1]), -fluxes[top], atol=1e-12)


def test_disk_flux_vanishes():
    assert np.linalg.norm(V.flux(S.flat_disk(1.0, 16), 0)) < 1e-12


def test_invalid_loop():
    mesh = S.flat_disk(1.0, 8)
    with pytest.raises(V.InvalidLoop):
        V.flux(mesh, 5)


def test_contact_angles():
    c = CatenoidSolution(c=1.0, d=1.0, R=math.cosh(1.0), branch="fat")
    cat = S.sample_surface(c, 64, 200)
    assert V.contact_angle_with_plane(cat)["mean_angle"] == pytest.approx(90.0, abs=0.5)
    caty = S.sample_surface(fat("y_catenoid"), 64, 200)
    assert V.contact_angle_with_plane(caty)["mean_angle"] == pytest.approx(120.0, abs=0.5)
    with pytest.raises(V.NoContactCurve):
        V.contact_angle_with_plane(S.flat_disk(1.0, 8), offset=0.5)


def test_plateau_report_on_y_catenoid(caty_mesh):
    y = caty_mesh.vertices[np.flatnonzero(caty_mesh.labels_array(VertexLabel.YCURVE))[0]]
    rep = V.plateau_report(caty_mesh, points=[y], plane={"normal": (0, 0, 1), "offset": 0.0}).to_dict()
    assert rep["y_angle_stats"]["max_dev"] < 1.0
    assert rep["t_angle_stats"] is None
    assert len(rep["flux_vectors"]) == 2
    assert rep["density_samples"][0]["theta"] == pytest.approx(1.5, abs=0.05)
