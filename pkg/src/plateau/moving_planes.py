"""Discrete moving planes: slopes, graph checks and reflection comparison.

Heights of the surface over the ``x3 = 0`` plane are sampled by casting
vertical rays on a regular grid; the hits do not depend on the reflection
height, so they are computed once per mesh and reused across a sweep.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import asdict, dataclass

import numpy as np
import shapely
from scipy import ndimage
from scipy.spatial import cKDTree

from .catenoids import golden_section_min
from .mesh import SingularMesh, VertexLabel

logger = logging.getLogger("plateau")

ORDER_TOL = 1e-6
SYMMETRY_THRESHOLD = 1e-2


class ProjectionMismatch(RuntimeWarning):
    pass


@dataclass
class SlopeResult:
    t: float
    max_slope: float
    empty: bool
    n_triangles: int


def slope_bound(mesh: SingularMesh, t: float, band: float) -> SlopeResult:
    """Largest ``|grad_S x3| = sqrt(1 - (n . e3)^2)`` over triangles meeting ``|x3 - t| < band``."""
    if band <= 0:
        raise ValueError("band must be positive")
    z = mesh.vertices[mesh.triangles, 2]
    hit = (z.min(axis=1) < t + band) & (z.max(axis=1) > t - band)
    if not hit.any():
        logger.info("slope_bound: empty slice at t=%g", t)
        return SlopeResult(t, 0.0, True, 0)
    nz = mesh.face_normals()[hit, 2]
    slope = np.sqrt(np.clip(1.0 - nz * nz, 0.0, None))
    return SlopeResult(t, float(slope.max()), False, int(hit.sum()))


def _clip_above(tri: np.ndarray, t: float) -> np.ndarray:
    out = []
    for i in range(3):
        p, q = tri[i], tri[(i + 1) % 3]
        pin, qin = p[2] >= t, q[2] >= t
        if pin:
            out.append(p)
        if pin != qin:
            s = (t - p[2]) / (q[2] - p[2])
            out.append(p + s * (q - p))
    return np.asarray(out)


def graph_check(mesh: SingularMesh, t: float) -> bool:
    """True when the vertical projection of the part above ``x3 = t`` is one-to-one.

    Two clipped triangles whose shadows overlap with positive area (above
    ``1e-10 scale^2``) make the projection non-injective.
    """
    corners = mesh.vertices[mesh.triangles]
    polys = []
    for tri in corners[corners[:, :, 2].max(axis=1) >= t]:
        clipped = _clip_above(tri, t)
        if len(clipped) < 3:
            continue
        poly = shapely.Polygon(clipped[:, :2])
        if poly.is_valid and poly.area > 0:
            polys.append(poly)
    if len(polys) < 2:
        return True
    tol = 1e-10 * mesh.scale**2
    polys = np.asarray(polys, dtype=object)
    left, right = shapely.STRtree(polys).query(polys, predicate="intersects")
    keep = left < right
    areas = shapely.area(shapely.intersection(polys[left[keep]], polys[right[keep]]))
    return not bool(np.any(areas > tol))


@dataclass
class RayHits:
    """Heights where vertical rays on a grid meet the surface."""

    xs: np.ndarray
    ys: np.ndarray
    ray: np.ndarray  # flat ray index per hit
    z: np.ndarray
    scale: float

    @property
    def shape(self):
        return (len(self.xs), len(self.ys))

    def points(self, idx, z):
        i, j = np.unravel_index(idx, self.shape)
        return np.column_stack([self.xs[i], self.ys[j], z])


def cast_rays(mesh: SingularMesh, n: int = 128) -> RayHits:
    """Intersect an ``n x n`` grid of vertical lines with every triangle."""
    v = mesh.vertices
    lo, hi = v[:, :2].min(axis=0), v[:, :2].max(axis=0)
    pad = 1e-3 * (hi - lo)
    xs = np.linspace(lo[0] + pad[0], hi[0] - pad[0], n)
    ys = np.linspace(lo[1] + pad[1], hi[1] - pad[1], n)
    dx, dy = xs[1] - xs[0], ys[1] - ys[0]
    a, b, c = mesh.corners()
    tmin = np.minimum(np.minimum(a, b), c)[:, :2]
    tmax = np.maximum(np.maximum(a, b), c)[:, :2]
    i0 = np.clip(np.ceil((tmin[:, 0] - xs[0]) / dx).astype(int), 0, n)
    i1 = np.clip(np.floor((tmax[:, 0] - xs[0]) / dx).astype(int), -1, n - 1)
    j0 = np.clip(np.ceil((tmin[:, 1] - ys[0]) / dy).astype(int), 0, n)
    j1 = np.clip(np.floor((tmax[:, 1] - ys[0]) / dy).astype(int), -1, n - 1)
    si, sj = np.maximum(i1 - i0 + 1, 0), np.maximum(j1 - j0 + 1, 0)
    counts = si * sj
    tri = np.repeat(np.arange(len(a)), counts)
    offs = np.arange(counts.sum()) - np.repeat(np.cumsum(counts) - counts, counts)
    ii = i0[tri] + offs // np.repeat(sj, counts).clip(min=1)
    jj = j0[tri] + offs % np.repeat(sj, counts).clip(min=1)
    px, py = xs[ii], ys[jj]
    A, B, C = a[tri], b[tri], c[tri]
    det = (B[:, 0] - A[:, 0]) * (C[:, 1] - A[:, 1]) - (C[:, 0] - A[:, 0]) * (B[:, 1] - A[:, 1])
    ok = np.abs(det) > 1e-14 * mesh.scale**2
    det = np.where(ok, det, 1.0)
    l1 = ((px - A[:, 0]) * (C[:, 1] - A[:, 1]) - (C[:, 0] - A[:, 0]) * (py - A[:, 1])) / det
    l2 = ((B[:, 0] - A[:, 0]) * (py - A[:, 1]) - (px - A[:, 0]) * (B[:, 1] - A[:, 1])) / det
    eps = 1e-12
    inside = ok & (l1 >= -eps) & (l2 >= -eps) & (l1 + l2 <= 1 + eps)
    z = A[:, 2] + l1 * (B[:, 2] - A[:, 2]) + l2 * (C[:, 2] - A[:, 2])
    ray = (ii * n + jj)[inside]
    z = z[inside]
    # rays through shared edges or vertices report the same height more than once
    order = np.lexsort((z, ray))
    ray, z = ray[order], z[order]
    tol = 1e-9 * mesh.scale
    dup = np.zeros(len(z), dtype=bool)
    dup[1:] = (ray[1:] == ray[:-1]) & (np.abs(z[1:] - z[:-1]) <= tol)
    return RayHits(xs, ys, ray[~dup], z[~dup], mesh.scale)


@dataclass
class ReflectResult:
    t: float
    reflect_residual: float
    order_ok: bool
    projection_mismatch: bool
    n_common: int


def reflect_compare(mesh_or_hits, t: float, n: int = 128, tol: float | None = None) -> ReflectResult:
    """Compare ``R_t`` of the part above ``t`` with the part below.

    ``order_ok`` holds when over every sampled location each lower height is
    at most every reflected upper height (within ``tol``, default
    ``1e-6 scale``) and the shadow of the upper part lies in the shadow of
    the lower part, away from the shadow's rim.  The residual is the
    two-sided Hausdorff distance between the two point clouds over rays
    that meet both parts.
    """
    hits = mesh_or_hits if isinstance(mesh_or_hits, RayHits) else cast_rays(mesh_or_hits, n)
    tol = ORDER_TOL * hits.scale if tol is None else tol
    nr = hits.shape[0] * hits.shape[1]
    up = hits.z >= t
    lo_mask = ~up
    refl = 2.0 * t - hits.z[up]
    r_up, r_lo = hits.ray[up], hits.ray[lo_mask]
    z_lo = hits.z[lo_mask]
    min_refl = np.full(nr, np.inf)
    np.minimum.at(min_refl, r_up, refl)
    max_low = np.full(nr, -np.inf)
    np.maximum.at(max_low, r_lo, z_lo)
    has_up = np.isfinite(min_refl)
    has_lo = np.isfinite(max_low)
    common = has_up & has_lo
    order_ok = bool(np.all(max_low[common] <= min_refl[common] + tol))
    any_hit = (has_up | has_lo).reshape(hits.shape)
    core = ndimage.binary_erosion(any_hit, iterations=2).ravel()
    mismatch = bool(np.any(has_up & ~has_lo & core))
    if mismatch:
        order_ok = False
    if not common.any():
        return ReflectResult(t, math.inf, order_ok, mismatch, 0)
    keep_up = common[r_up]
    keep_lo = common[r_lo]
    P = hits.points(r_up[keep_up], refl[keep_up])
    Q = hits.points(r_lo[keep_lo], z_lo[keep_lo])
    d1 = cKDTree(Q).query(P)[0].max()
    d2 = cKDTree(P).query(Q)[0].max()
    return ReflectResult(t, float(max(d1, d2)), order_ok, mismatch, int(common.sum()))


@dataclass
class SymmetryPlane:
    t_star: float
    residual: float


def detect_symmetry_plane(mesh: SingularMesh, t_range=None, n_steps: int = 41, n: int = 128, threshold: float = SYMMETRY_THRESHOLD) -> SymmetryPlane | None:
    """Height minimising the reflection residual, or ``None`` if nothing is symmetric enough."""
    if n_steps < 3:
        raise ValueError("n_steps must be >= 3")
    hits = cast_rays(mesh, n)
    if t_range is None:
        z = mesh.vertices[:, 2]
        span = z.max() - z.min()
        t_range = (z.min() + 0.25 * span, z.max() - 0.25 * span)
    ts = np.linspace(t_range[0], t_range[1], n_steps)
    f = lambda s: reflect_compare(hits, s).reflect_residual  # noqa: E731
    vals = np.array([f(s) for s in ts])
    k = int(np.argmin(vals))
    dt = ts[1] - ts[0]
    a, b = max(t_range[0], ts[k] - dt), min(t_range[1], ts[k] + dt)
    t_star, res = golden_section_min(f, a, b, tol=1e-9)
    if vals[k] < res:
        t_star, res = float(ts[k]), float(vals[k])
    if res > threshold * mesh.scale:
        return None
    return SymmetryPlane(float(t_star), float(res))


@dataclass
class SweepState:
    t: float
    p1_ok: bool
    p2_ok: bool
    p3_ok: bool
    p4_ok: bool
    p5_ok: bool
    max_slope: float
    reflect_residual: float
    order_ok: bool

    def to_dict(self) -> dict:
        return asdict(self)


def sweep(mesh: SingularMesh, ts, band: float | None = None, cells=None, n: int = 128) -> list[SweepState]:
    """Evaluate the discrete (P1)-(P5) stand-ins at each height.

    p1: no Y/T vertex in the slab; p2: slope below 1 on the slab; p3: the
    part above is a graph; p4: reflection order holds; p5: at most two
    cells meet the slab (checked only when ``cells`` is given, else true).
    """
    band = 1e-3 * mesh.scale if band is None else band
    hits = cast_rays(mesh, n)
    special = mesh.labels_array(VertexLabel.YCURVE) | mesh.labels_array(VertexLabel.TPOINT)
    zs = mesh.vertices[special, 2]
    out = []
    for t in ts:
        t = float(t)
        sl = slope_bound(mesh, t, band)
        rc = reflect_compare(hits, t)
        p5 = True
        if cells is not None:
            k = int(np.floor((t - cells.origin[2]) / cells.resolution))
            if 0 <= k < cells.labels.shape[2]:
                ids = np.unique(cells.labels[:, :, k])
                p5 = int((ids >= 0).sum()) <= 2
        out.append(
            SweepState(
                t=t,
                p1_ok=bool(not np.any(np.abs(zs - t) < band)),
                p2_ok=sl.max_slope < 1.0,
                p3_ok=graph_check(mesh, t),
                p4_ok=rc.order_ok,
                p5_ok=p5,
                max_slope=sl.max_slope,
                reflect_residual=rc.reflect_residual,
                order_ok=rc.order_ok,
            )
        )
    return out


def write_sweep_csv(states: list[SweepState], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "max_slope", "order_ok", "residual", "p1", "p2", "p3", "p4", "p5"])
        for s in states:
            w.writerow([repr(s.t), repr(s.max_slope), s.order_ok, repr(s.reflect_residual), s.p1_ok, s.p2_ok, s.p3_ok, s.p4_ok, s.p5_ok])
