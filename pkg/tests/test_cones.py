import numpy as np
import pytest

from plateau import cones
from plateau import sampling as S
from plateau.mesh import VertexLabel


def test_flat_interior_vertex_is_plane():
    mesh = S.flat_disk(1.0, 16)
    interior = np.flatnonzero(mesh.labels_array(VertexLabel.INTERIOR))
    for v in interior[:5]:
        fit = cones.classify_vertex(mesh, int(v))
        assert fit.type == "P"
        assert fit.fit_residual < 1e-12


def test_y_spine_vertex_is_y_with_spine():
    mesh = S.flat_y_cone(1.0, 4)
    v = int(np.flatnonzero(mesh.labels_array(VertexLabel.YCURVE))[2])
    fit = cones.classify_vertex(mesh, v)
    assert fit.type == "Y"
    assert abs(abs(fit.spine_direction @ [0, 0, 1]) - 1) < 1e-9
    assert len(fit.sheet_normals) == 3


def test_t_apex_is_t():
    mesh = S.t_cone(1.0, 2, 2)
    v = int(np.flatnonzero(mesh.labels_array(VertexLabel.TPOINT))[0])
    fit = cones.classify_vertex(mesh, v)
    assert fit.type == "T"
    assert fit.fit_residual < 1e-9
    assert len(fit.sheet_normals) == 6


@pytest.mark.parametrize("seed", range(3))
def test_rotation_invariance_of_y_fit(seed):
    from scipy.spatial.transform import Rotation

    mesh = S.flat_y_cone(1.0, 4)
    v = int(np.flatnonzero(mesh.labels_array(VertexLabel.YCURVE))[2])
    R = Rotation.random(random_state=seed).as_matrix()
    rotated = mesh.with_vertices(mesh.vertices @ R.T)
    fit = cones.classify_vertex(rotated, v)
    assert fit.type == "Y"
    assert abs(abs(fit.spine_direction @ (R @ [0, 0, 1])) - 1) < 1e-8


def test_tetrahedral_angle():
    assert cones.TET_ANGLE == pytest.approx(np.arccos(-1 / 3), abs=1e-15)
