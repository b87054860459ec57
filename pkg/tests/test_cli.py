import json

import pytest

from plateau import cli


def run(tmp_path, *argv):
    code = cli.run(["--output-dir", str(tmp_path), *argv])
    report = json.loads((tmp_path / "report.json").read_text()) if (tmp_path / "report.json").exists() else None
    return code, report


def test_census_figure_case(tmp_path):
    code, rep = run(tmp_path, "census", "--R", "1", "--d", "0.4")
    assert code == 0
    assert len(rep["entries"]) == 5
    meta = json.loads((tmp_path / "metadata.json").read_text())
    assert meta["command"] == "census" and "timestamp" in meta
    assert "timestamp" not in (tmp_path / "report.json").read_text()


def test_census_far(tmp_path):
    assert run(tmp_path, "census", "--R", "1", "--d", "2")[1]["counts"]["total"] == 1


def test_geonet_is_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    code, rep = run(a, "geonet", "--scenario", "y-perturb", "--seed", "7")
    assert code == 0 and rep["runs"][0]["classification"] == "YNet"
    run(b, "geonet", "--scenario", "y-perturb", "--seed", "7")
    assert (a / "report.json").read_bytes() == (b / "report.json").read_bytes()
    assert (a / "net.json").read_bytes() == (b / "net.json").read_bytes()


def test_sample_relax_verify_pipeline(tmp_path):
    s, r, v = tmp_path / "s", tmp_path / "r", tmp_path / "v"
    assert run(s, "sample", "--kind", "y_catenoid", "--branch", "fat", "--n-theta", "16", "--n-axial", "8")[0] == 0
    code, rep = run(r, "relax", "--mesh", str(s / "mesh.json"), "--grad-tol", "0.05", "--max-iters", "5000")
    assert code == 0 and rep["area_monotone"]
    for name in ("relaxed.json", "relax_history.csv", "area_history.svg"):
        assert (r / name).exists()
    code, rep = run(v, "verify", "--mesh", str(r / "relaxed.json"), "--point", "0", "0", "0", "--plane", "0", "0", "1", "0")
    assert code == 0 and rep["y_angle_stats"] is not None
    assert (v / "density.svg").exists()


def test_relax_reports_non_convergence(tmp_path):
    run(tmp_path / "s", "sample", "--kind", "catenoid", "--branch", "fat", "--n-theta", "16", "--n-axial", "8")
    code, _ = run(tmp_path / "r", "relax", "--mesh", str(tmp_path / "s" / "mesh.json"), "--max-iters", "1", "--noise", "0.01")
    assert code == 1


def test_svg_output_is_reproducible(tmp_path):
    for sub in ("a", "b"):
        run(tmp_path / sub, "sample", "--kind", "catenoid", "--branch", "fat", "--n-theta", "16", "--n-axial", "8")
        run(tmp_path / sub, "symmetry", "--mesh", str(tmp_path / sub / "mesh.json"), "--sweep", "0.1", "0.2", "--grid", "32", "--n-steps", "5")
    assert (tmp_path / "a" / "residual.svg").read_bytes() == (tmp_path / "b" / "residual.svg").read_bytes()


def test_cells_and_ends(tmp_path):
    run(tmp_path / "s", "sample", "--kind", "catenoid", "--branch", "fat", "--n-theta", "16", "--n-axial", "8")
    code, rep = run(tmp_path / "c", "cells", "--mesh", str(tmp_path / "s" / "mesh.json"))
    assert code == 0 and rep["cell_count"] == 2 and (tmp_path / "c" / "cells.bin").exists()
    run(tmp_path / "e0", "sample", "--kind", "catenoid", "--R", "27.3", "--d", "4", "--n-theta", "48", "--n-axial", "48")
    code, rep = run(tmp_path / "e", "ends", "--mesh", str(tmp_path / "e0" / "mesh.json"))
    assert code == 0 and abs(rep["balancing"]["sum_a"]) < 0.02


@pytest.mark.parametrize(
    "argv",
    [["bogus"], ["census", "--R", "1"], ["geonet", "--scenario", "nope"], ["relax", "--mesh", "missing.json"]],
)
def test_usage_and_file_errors(tmp_path, argv):
    assert cli.run(["--output-dir", str(tmp_path), *argv]) == 2


def test_malformed_mesh_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"vertices": [[0, 0, 0]], "triangles": [[0, 1]]}')
    assert cli.run(["--output-dir", str(tmp_path), "relax", "--mesh", str(bad)]) == 2
    assert "triangles[0]" in capsys.readouterr().err


def test_threads_env(tmp_path, monkeypatch):
    monkeypatch.setenv("PLATEAU_THREADS", "zero")
    assert cli.run(["--output-dir", str(tmp_path), "census", "--R", "1", "--d", "0.4"]) == 2
    monkeypatch.setenv("PLATEAU_THREADS", "4")
    assert cli.run(["--output-dir", str(tmp_path), "census", "--R", "1", "--d", "0.4"]) == 0
    assert json.loads((tmp_path / "metadata.json").read_text())["threads"] == "4"


def test_repro_subset(tmp_path, capsys):
    code, rep = run(tmp_path, "repro", "figure1", "--criteria", "1", "2")
    assert code == 0 and rep["all_passed"]
    out = capsys.readouterr().out
    assert "PASS criterion 1" in out and "PASS criterion 2" in out
