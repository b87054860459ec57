import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from plateau import mesh as M
from plateau import sampling as S
from plateau.mesh import EdgeLabel, VertexLabel


def counts(mesh):
    return (
        {lab: int(mesh.labels_array(lab).sum()) for lab in VertexLabel},
        {lab: len(mesh.edges_with(lab)) for lab in EdgeLabel},
    )


def test_flat_disk_labels():
    v, e = counts(S.flat_disk(1.0, 8))
    assert v[VertexLabel.BOUNDARY] == 8 and v[VertexLabel.INTERIOR] == 7
    assert e[EdgeLabel.TRIPLE] == 0 and e[EdgeLabel.BOUNDARY] == 8


def test_y_cone_has_triple_spine():
    mesh = S.flat_y_cone(1.0, 4)
    v, e = counts(mesh)
    assert e[EdgeLabel.TRIPLE] == 8
    assert v[VertexLabel.YCURVE] == 7
    assert v[VertexLabel.TPOINT] == 0


def test_t_cone_has_single_t_point():
    mesh = S.t_cone(1.0, 2, 2)
    v, _ = counts(mesh)
    assert v[VertexLabel.TPOINT] == 1
    assert mesh.vertex_labels[int(np.flatnonzero(mesh.labels_array(VertexLabel.TPOINT))[0])] is VertexLabel.TPOINT


@pytest.mark.parametrize("builder", [lambda: S.flat_disk(1.0, 12), lambda: S.flat_y_cone(1.0, 4), lambda: S.t_cone(1.0, 3, 3)])
def test_soup_roundtrip_preserves_labels(builder):
    mesh = builder()
    again = S.soup_roundtrip(mesh)
    assert counts(again) == counts(mesh)
    assert again.area() == pytest.approx(mesh.area(), rel=1e-14)


def test_catenoid_y_has_triple_loop(caty_mesh):
    _, e = counts(caty_mesh)
    assert e[EdgeLabel.TRIPLE] == 32
    assert len(caty_mesh.boundary_loops) == 2


def test_empty_input_rejected():
    with pytest.raises(M.EmptyInput):
        M.SingularMesh(np.zeros((0, 3)), np.zeros((0, 3), dtype=int))


def test_edge_id_missing_raises():
    mesh = S.flat_disk(1.0, 8)
    with pytest.raises(KeyError):
        mesh.edge_id(0, 10**6)


def test_validate_clean_and_intersecting():
    assert M.validate(S.flat_y_cone(1.0, 4)) == []
    kinds = {d.kind for d in M.validate(S.crossing_quads())}
    assert "UnresolvedIntersection" in kinds


def test_four_faces_on_an_edge_flagged():
    v = [[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, -1, 0], [0, 0, 1], [0, 0, -1]]
    t = [[0, 1, 2], [1, 0, 3], [0, 1, 4], [1, 0, 5]]
    kinds = {d.kind for d in M.validate(M.SingularMesh(v, t), check_intersections=False)}
    assert "NonPlateauIncidence" in kinds


def test_refine_keeps_area_and_labels_of_flat_mesh():
    mesh = S.flat_y_cone(1.0, 2)
    fine = M.refine(mesh)
    assert fine.n_triangles == 4 * mesh.n_triangles
    assert fine.area() == pytest.approx(mesh.area(), rel=1e-13)
    assert len(fine.edges_with(EdgeLabel.TRIPLE)) == 2 * len(mesh.edges_with(EdgeLabel.TRIPLE))


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=3, max_value=40), st.floats(min_value=0.1, max_value=10.0))
def test_barycentric_areas_partition_total(n, radius):
    mesh = S.flat_disk(radius, max(n, 8))
    assert mesh.barycentric_areas().sum() == pytest.approx(mesh.area(), rel=1e-12)
