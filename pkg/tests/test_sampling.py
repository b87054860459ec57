import math

import numpy as np
import pytest

from plateau import sampling as S
from plateau.catenoids import CatenoidSolution, DiskPair
from plateau.mesh import EdgeLabel, VertexLabel

from conftest import fat


def test_catenoid_samples_lie_on_profile(cat_mesh):
    sol = fat("catenoid")
    r = np.hypot(cat_mesh.vertices[:, 0], cat_mesh.vertices[:, 1])
    assert np.allclose(r, sol.radius(cat_mesh.vertices[:, 2]), atol=1e-12)


def test_y_catenoid_samples(caty_mesh):
    sol = fat("y_catenoid")
    x = caty_mesh.vertices
    on_disk = np.abs(x[:, 2]) < 1e-15
    r = np.hypot(x[:, 0], x[:, 1])
    assert np.allclose(r[~on_disk], sol.radius(x[~on_disk, 2]), atol=1e-12)
    y = caty_mesh.labels_array(VertexLabel.YCURVE)
    assert np.allclose(r[y], sol.disk_radius, atol=1e-12)


@pytest.mark.parametrize("grading", [1.0, 2.0])
def test_mirror_symmetry(grading):
    mesh = S.sample_surface(fat("catenoid"), 16, 8, grading=grading)
    pts = mesh.vertices
    mirrored = pts * [1, 1, -1]
    from scipy.spatial import cKDTree

    d, _ = cKDTree(pts).query(mirrored)
    assert d.max() < 1e-12


def test_grading_clusters_rows_near_waist():
    uniform = S.sample_surface(fat("catenoid"), 16, 16)
    graded = S.sample_surface(fat("catenoid"), 16, 16, grading=2.0)
    gap = lambda m: np.sort(np.unique(np.round(np.abs(m.vertices[:, 2]), 12)))[1]  # noqa: E731
    assert gap(graded) < 0.5 * gap(uniform)
    with pytest.raises(ValueError):
        S.sample_surface(fat("catenoid"), 16, 16, grading=0.5)


def test_disk_pair_area():
    mesh = S.sample_surface(DiskPair(R=1.0, d=0.3), 64, 4)
    assert mesh.area() == pytest.approx(2 * 64 / 2 * math.sin(2 * math.pi / 64), rel=1e-12)


def test_too_coarse():
    with pytest.raises(S.ResolutionTooCoarse):
        S.sample_surface(CatenoidSolution(c=1.0, d=0.5, R=math.cosh(0.5), branch="fat"), 4, 4)


def test_perturb_pins_boundary(rng):
    mesh = S.flat_y_cone(1.0, 4)
    moved = S.perturb(mesh, 0.01, rng)
    b = mesh.labels_array(VertexLabel.BOUNDARY)
    assert np.array_equal(moved.vertices[b], mesh.vertices[b])
    assert not np.array_equal(moved.vertices[~b], mesh.vertices[~b])
    assert len(moved.edges_with(EdgeLabel.TRIPLE)) == len(mesh.edges_with(EdgeLabel.TRIPLE))
