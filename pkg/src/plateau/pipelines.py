"""Report builders shared by the command line and the acceptance harness.

Each builder takes plain parameters, does the computation and returns a
JSON-ready dict (plus any artefacts the caller may want to save).  Nothing
here touches the file system.
"""

from __future__ import annotations

import logging
import math

import numpy as np

from . import area_flow, catenoids, cells, ends, geonets, moving_planes, sampling, verify
from .mesh import EdgeLabel, SingularMesh, VertexLabel

logger = logging.getLogger("plateau")

SCENARIOS = ("equator-perturb", "y-perturb")


def census_report(R: float, d: float) -> dict:
    census = catenoids.enumerate_spanning_surfaces(R, d)
    out = census.to_dict()
    out["counts"] = {
        "disk_pair": sum(isinstance(e, catenoids.DiskPair) for e in census.entries),
        "catenoid": len(census.catenoids),
        "y_catenoid": len(census.y_catenoids),
        "total": len(census.entries),
    }
    return out


def pick_solution(R: float, d: float, kind: str, branch: str | None = None):
    """The census entry of ``kind`` (``disk_pair``, ``catenoid``, ``y_catenoid``) and ``branch``."""
    census = catenoids.enumerate_spanning_surfaces(R, d)
    found = [e for e in census.entries if e.kind == kind and (branch is None or getattr(e, "branch", None) == branch)]
    if not found:
        raise ValueError(f"no {kind} (branch {branch}) spans R={R:g}, d={d:g}")
    return found[-1]


def mesh_summary(mesh: SingularMesh) -> dict:
    v_counts = {lab.value: int(mesh.labels_array(lab).sum()) for lab in VertexLabel}
    e_counts = {lab.value: int(len(mesh.edges_with(lab))) for lab in EdgeLabel}
    return {
        "n_vertices": mesh.n_vertices,
        "n_triangles": mesh.n_triangles,
        "area": mesh.area(),
        "vertex_labels": v_counts,
        "edge_labels": e_counts,
        "boundary_loops": len(mesh.boundary_loops),
    }


def sample_report(R: float, d: float, kind: str, branch: str | None, n_theta: int, n_axial: int, grading: float = 1.0):
    sol = pick_solution(R, d, kind, branch)
    mesh = sampling.sample_surface(sol, n_theta, n_axial, grading=grading)
    return mesh, {"solution": sol.to_dict(), "mesh": mesh_summary(mesh)}


def relax_report(mesh: SingularMesh, config: area_flow.RelaxConfig, noise: float = 0.0, seed: int = 0):
    if noise > 0:
        mesh = sampling.perturb(mesh, noise, np.random.default_rng(seed))
    relaxed, rep = area_flow.relax(mesh, config)
    out = {
        "noise": noise,
        "seed": seed,
        "relax": rep.to_dict(),
        "area_monotone": bool(np.all(np.diff(rep.area_history) <= 0)),
        "mesh": mesh_summary(relaxed),
    }
    res = area_flow.mean_curvature_residual(relaxed)
    out["max_mean_curvature_residual"] = max(res.values()) if res else 0.0
    if len(relaxed.edges_with(EdgeLabel.TRIPLE)):
        out["y_angle_stats"] = verify.dihedral_angles_along_triples(relaxed).to_dict()
    return relaxed, rep, out


def verify_report(mesh: SingularMesh, points=None, radii=None, plane=None) -> dict:
    rep = verify.plateau_report(mesh, points=points, radii=radii, plane=plane).to_dict()
    rep["mesh"] = mesh_summary(mesh)
    return rep


def cells_report(mesh: SingularMesh, domain=None, resolution: float | None = None):
    cx = cells.compute_cells(mesh, domain=domain, resolution=resolution)
    cond = cells.check_cell_condition(mesh, cx)
    out = cx.to_dict()
    out["cell_condition"] = cond
    out["traces"] = {str(k): cells.cell_boundary_trace(cx, k) for k in range(cx.cell_count)}
    return cx, out


def symmetry_report(mesh: SingularMesh, t_range=None, n_steps: int = 41, sweep_ts=None, n: int = 128):
    plane = moving_planes.detect_symmetry_plane(mesh, t_range=t_range, n_steps=n_steps, n=n)
    out = {"symmetry_plane": None if plane is None else {"t_star": plane.t_star, "residual": plane.residual}}
    states = []
    if sweep_ts is not None:
        states = moving_planes.sweep(mesh, sweep_ts, n=n)
        out["sweep"] = [s.to_dict() for s in states]
    return states, out


def geonet_report(scenario: str, seed: int, count: int = 1) -> tuple[list, dict]:
    """Relax ``count`` seeded perturbations of an equator or Y-net and classify them."""
    if scenario not in SCENARIOS:
        raise ValueError(f"unknown scenario {scenario!r}; choose from {SCENARIOS}")
    rng = np.random.default_rng(seed)
    expected = "Equator" if scenario == "equator-perturb" else "YNet"
    runs, nets = [], []
    for _ in range(count):
        net0 = geonets.perturbed_equator(rng) if scenario == "equator-perturb" else geonets.perturbed_y_net(rng)
        net, rep = geonets.net_relax(net0)
        nets.append(net)
        val = geonets.net_validate(net)
        runs.append(
            {
                "initial_length": net0.length(),
                "final_length": net.length(),
                "classification": rep.classification,
                "iterations": rep.iterations,
                "final_balance_residual": rep.final_balance_residual,
                "valid": val["ok"],
            }
        )
    out = {
        "scenario": scenario,
        "seed": seed,
        "expected": expected,
        "runs": runs,
        "all_correct": all(r["classification"] == expected for r in runs),
    }
    if count == 1:
        out["net"] = geonets.net_to_dict(nets[0])
    return nets, out


def _outer_loops(mesh: SingularMesh) -> tuple[int, int]:
    """Boundary loops with the highest and lowest mean height."""
    z = [mesh.vertices[loop, 2].mean() for loop in mesh.boundary_loops]
    return int(np.argmax(z)), int(np.argmin(z))


def ends_report(mesh: SingularMesh, annulus=None) -> tuple[list, dict]:
    """Fit the upper and lower sheets of a two-ended mesh and test balancing."""
    top, bottom = _outer_loops(mesh)
    fits = [
        ends.fit_end(mesh, annulus, side=+1, loop=top),
        ends.fit_end(mesh, annulus, side=-1, loop=bottom),
    ]
    bal = ends.check_end_balancing(fits)
    return fits, {"fits": [f.to_dict() for f in fits], "balancing": bal}


def loop_flux_report(mesh: SingularMesh) -> dict:
    top, bottom = _outer_loops(mesh)
    ft, fb = verify.flux(mesh, top), verify.flux(mesh, bottom)
    return {
        "top": ft.tolist(),
        "bottom": fb.tolist(),
        "sum": (ft + fb).tolist(),
        "top_e3_over_2pi": float(ft[2] / (2 * math.pi)),
    }
