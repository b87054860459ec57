"""Asymptotics of planar ends.

Over an annulus ``r_in <= |y| <= r_out`` in a fitted plane, the heights of
one sheet are regressed on ``log|y|``, ``1`` and ``y/|y|^2``, giving the
growth rate ``a``, offset ``b`` and the dipole vector ``c``.  Balancing of
the ends says the rates sum to zero, and each rate times ``2 pi`` matches
the vertical flux of the matching boundary loop.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .mesh import SingularMesh
from .moving_planes import graph_check
from .verify import flux

logger = logging.getLogger("plateau")

FLUX_RTOL = 0.03


class EndFitError(ValueError):
    pass


class NotAGraphOverPlane(EndFitError):
    pass


class AnnulusTooThin(EndFitError):
    pass


@dataclass
class EndFit:
    plane_rotation: np.ndarray
    center: np.ndarray
    a: float
    b: float
    c: np.ndarray
    residual_bound: float
    annulus: tuple
    n_samples: int
    loop: int | None = None
    loop_flux: np.ndarray | None = field(default=None, repr=False)

    @property
    def normal(self) -> np.ndarray:
        return self.plane_rotation[2]

    def to_dict(self) -> dict:
        return {
            "plane_rotation": self.plane_rotation.tolist(),
            "normal": self.normal.tolist(),
            "center": self.center.tolist(),
            "a": self.a,
            "b": self.b,
            "c": self.c.tolist(),
            "residual_bound": self.residual_bound,
            "annulus": list(self.annulus),
            "n_samples": self.n_samples,
            "loop": self.loop,
            "loop_flux": None if self.loop_flux is None else self.loop_flux.tolist(),
        }


def _canonical(n: np.ndarray) -> np.ndarray:
    if abs(n[2]) > 1e-12:
        return n if n[2] > 0 else -n
    k = int(np.flatnonzero(np.abs(n) > 1e-12)[0])
    return n if n[k] > 0 else -n


def _frame(normal: np.ndarray) -> np.ndarray:
    n = normal / np.linalg.norm(normal)
    helper = np.eye(3)[int(np.argmin(np.abs(n)))]
    e1 = np.cross(helper, n)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(n, e1)
    return np.stack([e1, e2, n])


def _ring_normal(mesh: SingularMesh, tri_mask: np.ndarray) -> np.ndarray:
    """Principal axis of the area-weighted normal tensor over selected triangles."""
    N = mesh.face_normals(unit=False)[tri_mask]
    w, v = np.linalg.eigh(N.T @ N)
    return _canonical(v[:, -1])


def _submesh(mesh: SingularMesh, tri_mask: np.ndarray) -> SingularMesh:
    tris = mesh.triangles[tri_mask]
    used, inv = np.unique(tris, return_inverse=True)
    return SingularMesh(mesh.vertices[used], inv.reshape(-1, 3))


def fit_end(mesh: SingularMesh, annulus=None, *, side: int | None = None, center=None, normal=None, loop: int | None = None) -> EndFit:
    """Fit ``u(y) = a log|y| + b + c . y / |y|^2`` to one sheet of an end.

    ``side`` (+1 or -1) keeps only vertices on that side of the plane
    through ``center`` (default the origin), which separates the two sheets
    of a catenoid-like mesh.  The plane normal defaults to the principal
    axis of the normals of the outer ring.  ``annulus`` defaults to
    ``[0.4, 0.9]`` times the largest in-plane radius.  When ``loop`` is
    given, its flux is stored for the balancing check.
    """
    x = mesh.vertices
    center = np.zeros(3) if center is None else np.asarray(center, dtype=float)
    rel = x - center
    if normal is None:
        r0 = np.hypot(rel[:, 0], rel[:, 1])
        outer = r0 >= 0.8 * r0.max()
        tri_outer = outer[mesh.triangles].all(axis=1)
        if side is not None:
            tri_outer &= (np.sign(rel[mesh.triangles, 2]) == side).all(axis=1)
        if not tri_outer.any():
            raise EndFitError("no triangles in the outer ring to fit a plane from")
        normal = _ring_normal(mesh, tri_outer)
    R = _frame(_canonical(np.asarray(normal, dtype=float)))
    local = rel @ R.T
    y, u = local[:, :2], local[:, 2]
    r = np.linalg.norm(y, axis=1)
    if annulus is None:
        annulus = (0.4 * r.max(), 0.9 * r.max())
    r_in, r_out = map(float, annulus)
    if r_out < 2 * r_in:
        raise AnnulusTooThin(f"r_out={r_out:g} < 2 r_in={2 * r_in:g}")
    sel = (r >= r_in) & (r <= r_out)
    if side is not None:
        sel &= np.sign(u) == side
    tri_sel = sel[mesh.triangles].all(axis=1)
    if tri_sel.sum() == 0 or sel.sum() < 4:
        raise EndFitError("annulus holds too few samples")
    sub = _submesh(SingularMesh(local, mesh.triangles, _topology=mesh._topo), tri_sel)
    if not graph_check(sub, -math.inf):
        raise NotAGraphOverPlane("sheet folds over the fitted plane inside the annulus")
    ys, us, rs = y[sel], u[sel], r[sel]
    A = np.column_stack([np.log(rs), np.ones_like(rs), ys[:, 0] / rs**2, ys[:, 1] / rs**2])
    coef, *_ = np.linalg.lstsq(A, us, rcond=None)
    res = us - A @ coef
    fit = EndFit(
        plane_rotation=R,
        center=center,
        a=float(coef[0]),
        b=float(coef[1]),
        c=coef[2:].copy(),
        residual_bound=float(np.max(np.abs(res)) * r_out**2),
        annulus=(r_in, r_out),
        n_samples=int(sel.sum()),
    )
    if loop is not None:
        fit.loop = int(loop)
        fit.loop_flux = flux(mesh, loop)
    return fit


def check_end_balancing(fits: list[EndFit], rtol: float = FLUX_RTOL) -> dict:
    """Sum of growth rates and agreement of ``2 pi a_i`` with each loop's flux along the normal."""
    if len(fits) < 2:
        raise ValueError("need at least two end fits")
    sum_a = float(sum(f.a for f in fits))
    matches = []
    for f in fits:
        if f.loop_flux is None:
            matches.append(None)
            continue
        expected = 2 * math.pi * f.a
        got = float(f.loop_flux @ f.normal)
        scale = max(abs(expected), abs(got), 1e-300)
        matches.append({"expected": expected, "flux_normal": got, "ok": abs(got - expected) <= rtol * scale})
    normals = np.array([f.normal for f in fits])
    spread = max(math.degrees(math.acos(np.clip(abs(n @ normals[0]), -1, 1))) for n in normals)
    return {
        "sum_a": sum_a,
        "a": [f.a for f in fits],
        "vertical_flux_match": matches,
        "flux_ok": all(m is None or m["ok"] for m in matches),
        "normal_spread_deg": spread,
    }
