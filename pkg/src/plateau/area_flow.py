"""Area-minimising relaxation of singular meshes.

The energy is the plain sum of triangle areas, so its gradient is defined
verbatim on triple edges: a Y-curve vertex simply collects the pull of all
three sheets, and stationarity there is the discrete balance of conormals.
Boundary vertices are pinned; the connectivity (and hence the singular
structure) never changes.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .mesh import SingularMesh, VertexLabel, refine

logger = logging.getLogger("plateau")

DEGENERATE_RATIO = 1e-14


class RelaxError(RuntimeError):
    pass


class DivergenceDetected(RelaxError):
    pass


class MeshCollapse(RelaxError):
    pass


@dataclass(frozen=True)
class FixedStep:
    eta: float


@dataclass(frozen=True)
class BacktrackingLineSearch:
    beta: float = 0.5
    c1: float = 1e-4
    initial_step: float = 0.1

    def __post_init__(self):
        if not (0 < self.beta < 1 and 0 < self.c1 < 1):
            raise ValueError("need 0 < beta < 1 and 0 < c1 < 1")


StepRule = Union[FixedStep, BacktrackingLineSearch]


@dataclass
class RelaxConfig:
    max_iters: int = 5000
    grad_tol: float = 1e-3
    step_rule: StepRule = field(default_factory=BacktrackingLineSearch)
    pin_boundary: bool = True
    refine_every: int = 0
    threads: int = 1

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.grad_tol <= 0:
            raise ValueError("grad_tol must be positive")


@dataclass
class RelaxReport:
    iterations: int
    area_history: list
    grad_history: list
    final_grad_norm: float
    converged: bool

    def to_dict(self) -> dict:
        return {
            "iterations": self.iterations,
            "area_history": list(self.area_history),
            "final_grad_norm": self.final_grad_norm,
            "converged": self.converged,
        }

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["iter", "area", "grad_norm"])
            for i, (a, g) in enumerate(zip(self.area_history, self.grad_history)):
                w.writerow([i, repr(a), repr(g)])


def _area_and_gradient(vertices: np.ndarray, triangles: np.ndarray, scale2: float):
    a = vertices[triangles[:, 0]]
    b = vertices[triangles[:, 1]]
    c = vertices[triangles[:, 2]]
    N = np.cross(b - a, c - a)
    norm = np.linalg.norm(N, axis=1)
    area = 0.5 * norm
    degenerate = area <= DEGENERATE_RATIO * scale2
    n = N / np.where(degenerate, 1.0, norm)[:, None]
    n[degenerate] = 0.0
    grad = np.zeros_like(vertices)
    # d(area)/da = 1/2 n x (c - b), cyclically
    np.add.at(grad, triangles[:, 0], 0.5 * np.cross(n, c - b))
    np.add.at(grad, triangles[:, 1], 0.5 * np.cross(n, a - c))
    np.add.at(grad, triangles[:, 2], 0.5 * np.cross(n, b - a))
    return float(area.sum()), grad, int(degenerate.sum())


def total_area(mesh: SingularMesh) -> float:
    return mesh.area()


def area_gradient(mesh: SingularMesh) -> np.ndarray:
    """Exact gradient of total area with respect to every vertex position.

    Triangles whose area falls below ``1e-14`` times the squared mesh scale
    contribute nothing (a warning is logged).
    """
    _, grad, n_bad = _area_and_gradient(mesh.vertices, mesh.triangles, mesh.scale**2)
    if n_bad:
        logger.warning("area_gradient: %d degenerate triangles capped", n_bad)
    return grad


def mean_curvature_residual(mesh: SingularMesh) -> dict[int, float]:
    """``|grad A| / A_v`` for interior vertices, ``A_v`` the barycentric area.

    For a smooth surface this tends to twice the mean curvature.
    """
    grad = area_gradient(mesh)
    bary = mesh.barycentric_areas()
    interior = np.flatnonzero(mesh.labels_array(VertexLabel.INTERIOR))
    vals = np.linalg.norm(grad[interior], axis=1) / bary[interior]
    return dict(zip(interior.tolist(), vals.tolist()))


def free_mask(mesh: SingularMesh, pin_boundary: bool = True) -> np.ndarray:
    free = np.ones(mesh.n_vertices, dtype=bool)
    if pin_boundary:
        free &= ~mesh.labels_array(VertexLabel.BOUNDARY)
    return free


def stationarity(mesh: SingularMesh, grad: np.ndarray, free: np.ndarray) -> float:
    """Largest mass-normalised gradient ``|g_v| / A_v`` over free vertices."""
    bary = mesh.barycentric_areas()
    if not free.any():
        return 0.0
    return float(np.max(np.linalg.norm(grad[free], axis=1) / bary[free]))


def relax(mesh: SingularMesh, config: RelaxConfig | None = None) -> tuple[SingularMesh, RelaxReport]:
    """Descend the total area with pinned boundary and free triple curves.

    Steps move each free vertex along ``-g_v / A_v`` (the gradient scaled by
    the inverse barycentric area), which makes the step length insensitive
    to local mesh size.  Convergence is declared when the largest
    mass-normalised gradient falls below ``config.grad_tol``.
    """
    config = config or RelaxConfig()
    free = free_mask(mesh, config.pin_boundary)
    if config.pin_boundary and not mesh.boundary_loops:
        raise ValueError("pin_boundary requires boundary loops")
    tris = mesh.triangles
    scale2 = mesh.scale**2
    x = mesh.vertices.copy()
    area, grad, _ = _area_and_gradient(x, tris, scale2)
    bary = mesh.barycentric_areas()
    rule = config.step_rule
    step = rule.eta if isinstance(rule, FixedStep) else rule.initial_step
    history = [area]
    g_hist = []
    increases = 0
    it = 0
    current = mesh
    for it in range(1, config.max_iters + 1):
        if config.refine_every and it % config.refine_every == 0:
            current = refine(current.with_vertices(x))
            free = free_mask(current, config.pin_boundary)
            tris = current.triangles
            x = current.vertices.copy()
            area, grad, _ = _area_and_gradient(x, tris, scale2)
        bary = current.with_vertices(x).barycentric_areas() if it == 1 or config.refine_every else bary
        direction = np.where(free[:, None], grad / np.maximum(bary, 1e-300)[:, None], 0.0)
        gnorm = float(np.max(np.linalg.norm(direction[free], axis=1))) if free.any() else 0.0
        g_hist.append(gnorm)
        if gnorm < config.grad_tol:
            it -= 1
            break
        if isinstance(rule, FixedStep):
            x_new = x - rule.eta * direction
            a_new, g_new, n_bad = _area_and_gradient(x_new, tris, scale2)
            if n_bad:
                raise MeshCollapse(f"{n_bad} triangles degenerated at iteration {it}")
            increases = increases + 1 if a_new > area else 0
            if increases >= 10:
                raise DivergenceDetected("area increased for 10 consecutive steps")
        else:
            slope = float(np.sum(grad * direction))
            step = min(step / rule.beta, 1e6)
            while True:
                x_new = x - step * direction
                a_new, g_new, n_bad = _area_and_gradient(x_new, tris, scale2)
                if n_bad == 0 and a_new <= area - rule.c1 * step * slope:
                    break
                step *= rule.beta
                if step < 1e-300:
                    raise MeshCollapse("line search failed to find a decreasing step")
            if a_new > area:  # pragma: no cover - guarded by the Armijo test
                a_new, x_new, g_new = area, x, grad
        x, area, grad = x_new, a_new, g_new
        bary = _bary(x, tris)
        history.append(area)
    else:
        direction = np.where(free[:, None], grad / np.maximum(bary, 1e-300)[:, None], 0.0)
        g_hist.append(float(np.max(np.linalg.norm(direction[free], axis=1))) if free.any() else 0.0)
    final = current.with_vertices(x)
    report = RelaxReport(
        iterations=it,
        area_history=history,
        grad_history=g_hist,
        final_grad_norm=g_hist[-1],
        converged=g_hist[-1] < config.grad_tol,
    )
    return final, report


def _bary(x, tris):
    a, b, c = x[tris[:, 0]], x[tris[:, 1]], x[tris[:, 2]]
    third = np.linalg.norm(np.cross(b - a, c - a), axis=1) / 6.0
    out = np.zeros(len(x))
    for k in range(3):
        np.add.at(out, tris[:, k], third)
    return out
