import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from plateau import geonets as G
from plateau import io
from plateau import sampling as S
from plateau.mesh import EdgeLabel


@pytest.mark.parametrize("suffix", [".json", ".obj"])
def test_mesh_round_trip_is_bit_exact(tmp_path, rng, suffix):
    mesh = S.perturb(S.flat_y_cone(1.0, 4), 1e-3, rng)
    path = tmp_path / f"m{suffix}"
    io.save_mesh(mesh, path)
    back = io.load_mesh(path)
    assert np.array_equal(back.vertices, mesh.vertices)
    assert np.array_equal(back.triangles, mesh.triangles)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(allow_nan=False, allow_infinity=False, width=64), min_size=9, max_size=9))
def test_arbitrary_floats_round_trip(tmp_path_factory, coords):
    v = np.array(coords).reshape(3, 3)
    path = tmp_path_factory.mktemp("f") / "m.json"
    path.write_text(json.dumps({"vertices": v.tolist(), "triangles": [[0, 1, 2]]}))
    data = json.loads(path.read_text())
    assert np.array_equal(np.array(data["vertices"]), v)


def test_obj_soup_welds_into_triple_edges(tmp_path):
    mesh = S.flat_y_cone(1.0, 3)
    lines = []
    for k, tri in enumerate(mesh.triangles):
        for p in mesh.vertices[tri]:
            lines.append("v {!r} {!r} {!r}".format(*p.tolist()))
        lines.append(f"f {3 * k + 1} {3 * k + 2} {3 * k + 3}")
    path = tmp_path / "soup.obj"
    path.write_text("\n".join(lines) + "\n")
    welded = io.load_mesh(path, weld=True)
    assert len(welded.edges_with(EdgeLabel.TRIPLE)) == len(mesh.edges_with(EdgeLabel.TRIPLE)) > 0


def test_obj_quads_and_comments(tmp_path):
    path = tmp_path / "q.obj"
    path.write_text("# square\nv 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1/1 2/2 3/3 4/4\n")
    mesh = io.load_mesh(path)
    assert mesh.n_triangles == 2 and mesh.area() == pytest.approx(1.0)


@pytest.mark.parametrize(
    "payload,field",
    [
        ({"triangles": [[0, 1, 2]]}, "vertices"),
        ({"vertices": [[0, 0, 0]] * 3, "triangles": [[0, 1]]}, "triangles[0]"),
        ({"vertices": [[0, 0, "x"]], "triangles": []}, "vertices[0]"),
        ({"vertices": [[0, 0, 0]] * 3, "triangles": [[0, 1, 7]]}, "triangles[0]"),
        ({"vertices": [[0, 0, 0]] * 3, "triangles": [[0, 1, 2.5]]}, "triangles[0]"),
    ],
)
def test_malformed_mesh_names_field(tmp_path, payload, field):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(payload))
    with pytest.raises(io.FormatError) as exc:
        io.load_mesh(path)
    assert exc.value.field == field
    assert field in str(exc.value)


def test_invalid_json_reports_line(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{\n  "vertices": [\n  oops\n}')
    with pytest.raises(io.FormatError) as exc:
        io.load_mesh(path)
    assert exc.value.line == 3


def test_bad_obj_line(tmp_path):
    path = tmp_path / "bad.obj"
    path.write_text("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 9\n")
    with pytest.raises(io.FormatError) as exc:
        io.load_mesh(path)
    assert exc.value.line == 4


def test_net_round_trip(tmp_path):
    net = G.make_y_net((0.0, 0.6, 0.8), 0.3, n=16)
    path = tmp_path / "net.json"
    io.save_net(net, path)
    back = io.load_net(path)
    assert np.array_equal(back.junctions, net.junctions)
    for a, b in zip(back.arcs, net.arcs):
        assert (a.start, a.end) == (b.start, b.end)
        assert np.array_equal(a.points, b.points)


@pytest.mark.parametrize(
    "payload,field",
    [
        ({"arcs": []}, "junctions"),
        ({"junctions": [], "arcs": [{"from": 3, "to": None, "samples": [[1, 0, 0], [0, 1, 0]]}]}, "arcs[0].from"),
        ({"junctions": [], "arcs": [{"from": None, "to": None}]}, "arcs[0].samples"),
    ],
)
def test_malformed_net(tmp_path, payload, field):
    path = tmp_path / "net.json"
    path.write_text(json.dumps(payload))
    with pytest.raises(io.FormatError) as exc:
        io.load_net(path)
    assert exc.value.field == field


def test_report_serialisation_is_canonical():
    a = io.dumps({"b": np.float64(0.1), "a": np.arange(3), "c": np.bool_(True)})
    b = io.dumps({"c": True, "a": [0, 1, 2], "b": 0.1})
    assert a == b
    assert io.report_hash({"x": 1}) == io.report_hash({"x": 1})
