import numpy as np
import pytest

from plateau import cells as CL
from plateau import sampling as S
from plateau.mesh import VertexLabel


@pytest.fixture(scope="module")
def cat_cells(cat_mesh):
    return CL.compute_cells(cat_mesh)


@pytest.fixture(scope="module")
def caty_cells(caty_mesh):
    return CL.compute_cells(caty_mesh)


def test_catenoid_two_cells(cat_cells, cat_mesh):
    assert cat_cells.cell_count == 2
    assert cat_cells.resolution <= CL.default_resolution(cat_mesh) + 1e-15
    assert CL.check_cell_condition(cat_mesh, cat_cells)["ok"]


def test_y_catenoid_three_cells_meet_at_triple_loop(caty_cells, caty_mesh):
    assert caty_cells.cell_count == 3
    v = np.flatnonzero(caty_mesh.labels_array(VertexLabel.YCURVE))[0]
    assert len(caty_cells.cells_near(caty_mesh.vertices[v], 4 * caty_cells.resolution)) == 3
    assert CL.check_cell_condition(caty_mesh, caty_cells)["ok"]


def test_t_cone_four_cells_at_apex():
    mesh = S.t_cone(1.0, 4, 4)
    cx = CL.compute_cells(mesh, domain=CL.Box([-0.4] * 3, [0.4] * 3))
    assert cx.cell_count == 4
    assert len(cx.cells_near([0, 0, 0], 0.2)) == 4


def test_flat_disk_splits_box():
    cx = CL.compute_cells(S.flat_disk(1.0, 16), domain=CL.Box([-0.5] * 3, [0.5] * 3))
    assert cx.cell_count == 2
    assert cx.cell_at([0, 0, 0.3]) != cx.cell_at([0, 0, -0.3])
    assert sorted(cx.cell_volumes) == pytest.approx([0.5, 0.5], rel=0.1)


def test_nonsimple_mesh_fails_cell_condition():
    mesh = S.nonsimple_bigraph()
    cx = CL.compute_cells(mesh)
    cond = CL.check_cell_condition(mesh, cx)
    assert not cond["ok"] and cond["violations"]


def test_cell_ids_are_permutation_invariant(cat_mesh):
    rng = np.random.default_rng(0)
    perm = rng.permutation(cat_mesh.n_triangles)
    shuffled = type(cat_mesh)(cat_mesh.vertices, cat_mesh.triangles[perm])
    a = CL.compute_cells(cat_mesh)
    b = CL.compute_cells(shuffled)
    assert np.array_equal(a.labels, b.labels)


def test_dump_and_load(tmp_path, cat_cells):
    path = tmp_path / "grid.bin"
    cat_cells.dump(path)
    labels, res = CL.load_grid(path)
    assert res == cat_cells.resolution
    assert np.array_equal(labels, cat_cells.labels)


def test_traces(cat_cells):
    inner = cat_cells.cell_at([0.0, 0.0, 0.0])
    outer = 1 - inner
    faces_inner = {t["face"] for t in CL.cell_boundary_trace(cat_cells, inner)}
    assert {"bottom", "top"} <= faces_inner
    lateral = [t for t in CL.cell_boundary_trace(cat_cells, outer) if t["face"] == "lateral"]
    assert lateral and all(t["z_min"] > -0.5 and t["z_max"] < 0.5 for t in lateral)
    with pytest.raises(ValueError):
        CL.cell_boundary_trace(cat_cells, 7)


def test_box_validation():
    with pytest.raises(ValueError):
        CL.Box([0, 0, 0], [0, 1, 1])
