"""Command-line entry point: ``plateau <subcommand> [options]``.

Every subcommand writes ``report.json`` (deterministic for fixed inputs)
and ``metadata.json`` (timestamp, versions, argv) under ``--output-dir``,
plus any meshes, CSV tables or SVG plots it produces.  Exit codes: 0 on
success, 1 when a validation or acceptance check fails, 2 on usage or
input-file errors.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from . import area_flow, cells, io, moving_planes, pipelines, repro
from .mesh import MeshError
from .plots import emit_plot

logger = logging.getLogger("plateau")

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _threads() -> int:
    raw = os.environ.get("PLATEAU_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"PLATEAU_THREADS must be an integer, got {raw!r}") from None
    if n < 1:
        raise UsageError("PLATEAU_THREADS must be >= 1")
    return n


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="plateau", description="Minimal Plateau surfaces: construction, relaxation, verification.")
    p.add_argument("--output-dir", default=".", help="directory for all outputs (created if missing)")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("census", help="enumerate disks, catenoids and Y-catenoids spanning two coaxial circles")
    s.add_argument("--R", type=float, required=True)
    s.add_argument("--d", type=float, required=True)

    s = sub.add_parser("sample", help="triangulate a census entry")
    s.add_argument("--R", type=float, default=1.0)
    s.add_argument("--d", type=float, default=0.4)
    s.add_argument("--kind", choices=("disk_pair", "catenoid", "y_catenoid"), default="y_catenoid")
    s.add_argument("--branch", choices=("fat", "skinny"), default=None)
    s.add_argument("--n-theta", type=int, default=64)
    s.add_argument("--n-axial", type=int, default=32)
    s.add_argument("--grading", type=float, default=1.0)
    s.add_argument("--format", choices=("json", "obj"), default="json")

    s = sub.add_parser("relax", help="area-minimising relaxation of a mesh")
    s.add_argument("--mesh", required=True)
    s.add_argument("--max-iters", type=int, default=5000)
    s.add_argument("--grad-tol", type=float, default=1e-3)
    s.add_argument("--step", choices=("backtracking", "fixed"), default="backtracking")
    s.add_argument("--eta", type=float, default=1e-3, help="step size for --step fixed")
    s.add_argument("--refine-every", type=int, default=0)
    s.add_argument("--noise", type=float, default=0.0, help="Gaussian perturbation of free vertices before relaxing")
    s.add_argument("--seed", type=int, default=0)

    s = sub.add_parser("verify", help="dihedral angles, densities, fluxes and contact angle")
    s.add_argument("--mesh", required=True)
    s.add_argument("--point", type=float, nargs=3, action="append", default=None, help="density sample point (repeatable)")
    s.add_argument("--radii", type=float, nargs="+", default=None)
    s.add_argument("--plane", type=float, nargs=4, default=None, metavar=("NX", "NY", "NZ", "OFFSET"))

    s = sub.add_parser("cells", help="voxel cell decomposition of the complement")
    s.add_argument("--mesh", required=True)
    s.add_argument("--resolution", type=float, default=None)
    s.add_argument("--box", type=float, nargs=6, default=None, metavar=("X0", "Y0", "Z0", "X1", "Y1", "Z1"))

    s = sub.add_parser("symmetry", help="moving-planes sweep and symmetry-plane detection")
    s.add_argument("--mesh", required=True)
    s.add_argument("--t-range", type=float, nargs=2, default=None)
    s.add_argument("--n-steps", type=int, default=41)
    s.add_argument("--sweep", type=float, nargs="+", default=None, help="heights for the moving-planes sweep")
    s.add_argument("--grid", type=int, default=128)

    s = sub.add_parser("geonet", help="relax and classify seeded perturbations of geodesic nets")
    s.add_argument("--scenario", choices=pipelines.SCENARIOS, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--count", type=int, default=1)

    s = sub.add_parser("ends", help="fit planar-end asymptotics and test balancing")
    s.add_argument("--mesh", required=True)
    s.add_argument("--annulus", type=float, nargs=2, default=None, metavar=("R_IN", "R_OUT"))

    s = sub.add_parser("repro", help="run the acceptance suite")
    s.add_argument("target", choices=("figure1",))
    s.add_argument("--criteria", type=int, nargs="+", default=None, choices=sorted(repro.CRITERIA))
    return p


# -- subcommand bodies: each returns (report, exit code) -------------------------------


def _census(a, out: Path):
    return pipelines.census_report(a.R, a.d), EXIT_OK


def _sample(a, out: Path):
    mesh, rep = pipelines.sample_report(a.R, a.d, a.kind, a.branch, a.n_theta, a.n_axial, a.grading)
    name = f"mesh.{a.format}"
    io.save_mesh(mesh, out / name)
    rep["mesh_file"] = name
    return rep, EXIT_OK


def _relax(a, out: Path):
    mesh = io.load_mesh(a.mesh)
    rule = area_flow.FixedStep(a.eta) if a.step == "fixed" else area_flow.BacktrackingLineSearch()
    config = area_flow.RelaxConfig(
        max_iters=a.max_iters, grad_tol=a.grad_tol, step_rule=rule, refine_every=a.refine_every, threads=_threads()
    )
    relaxed, rep, report = pipelines.relax_report(mesh, config, noise=a.noise, seed=a.seed)
    io.save_mesh(relaxed, out / "relaxed.json")
    rep.write_csv(out / "relax_history.csv")
    emit_plot(
        {"area": (range(len(rep.area_history)), rep.area_history)},
        out / "area_history.svg",
        xlabel="iteration",
        ylabel="area",
    )
    return report, EXIT_OK if rep.converged else EXIT_FAILED


def _verify(a, out: Path):
    mesh = io.load_mesh(a.mesh)
    plane = None if a.plane is None else {"normal": a.plane[:3], "offset": a.plane[3]}
    rep = pipelines.verify_report(mesh, points=a.point, radii=a.radii, plane=plane)
    if rep["density_samples"]:
        series = {}
        for s in rep["density_samples"]:
            key = "({:.3g}, {:.3g}, {:.3g})".format(*s["point"])
            xs, ys = series.setdefault(key, ([], []))
            xs.append(s["radius"])
            ys.append(s["theta"])
        emit_plot(series, out / "density.svg", xlabel="radius", ylabel="density")
    return rep, EXIT_OK


def _cells(a, out: Path):
    mesh = io.load_mesh(a.mesh)
    domain = None if a.box is None else cells.Box(a.box[:3], a.box[3:])
    cx, rep = pipelines.cells_report(mesh, domain=domain, resolution=a.resolution)
    cx.dump(out / "cells.bin")
    return rep, EXIT_OK


def _symmetry(a, out: Path):
    mesh = io.load_mesh(a.mesh)
    states, rep = pipelines.symmetry_report(mesh, a.t_range, a.n_steps, a.sweep, a.grid)
    if states:
        moving_planes.write_sweep_csv(states, out / "sweep.csv")
        emit_plot(
            {"residual": ([s.t for s in states], [s.reflect_residual for s in states])},
            out / "residual.svg",
            xlabel="t",
            ylabel="reflection residual",
        )
    return rep, EXIT_OK


def _geonet(a, out: Path):
    if a.count < 1:
        raise UsageError("--count must be >= 1")
    nets, rep = pipelines.geonet_report(a.scenario, a.seed, a.count)
    if a.count == 1:
        io.save_net(nets[0], out / "net.json")
    return rep, EXIT_OK if rep["all_correct"] else EXIT_FAILED


def _ends(a, out: Path):
    mesh = io.load_mesh(a.mesh)
    _, rep = pipelines.ends_report(mesh, a.annulus)
    return rep, EXIT_OK


def _repro(a, out: Path):
    results = repro.run_suite(a.criteria)
    for r in results:
        print(r.line())
    rep = {"target": a.target, "criteria": [r.to_dict() for r in results], "all_passed": all(r.passed for r in results)}
    return rep, EXIT_OK if rep["all_passed"] else EXIT_FAILED


COMMANDS = {
    "census": _census,
    "sample": _sample,
    "relax": _relax,
    "verify": _verify,
    "cells": _cells,
    "symmetry": _symmetry,
    "geonet": _geonet,
    "ends": _ends,
    "repro": _repro,
}


def run(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:  # argparse reports usage errors itself
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    out = Path(args.output_dir)
    try:
        _threads()
        out.mkdir(parents=True, exist_ok=True)
        report, code = COMMANDS[args.command](args, out)
    except (UsageError, FileNotFoundError, IsADirectoryError, io.FormatError) as exc:
        print(f"plateau: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (MeshError, ValueError) as exc:
        print(f"plateau: validation failed: {exc}", file=sys.stderr)
        return EXIT_FAILED
    digest = io.write_report(report, out / "report.json")
    io.write_metadata(out / "metadata.json", args.command, argv, digest)
    if args.command != "repro":
        print(f"{args.command}: wrote {out / 'report.json'}")
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
