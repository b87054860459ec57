"""Cells of the complement of a singular mesh, on a voxel grid.

Voxels touched by the surface (conservative separating-axis overlap test)
are walls; the remaining voxels inside the domain are split into 6-connected
components.  Cell ids follow the raster order of each component's first
voxel, so numbering is deterministic.
"""

from __future__ import annotations

import logging
import math
import struct
from dataclasses import dataclass, field

import numpy as np
import shapely
from scipy import ndimage

from .mesh import EdgeLabel, SingularMesh, VertexLabel

logger = logging.getLogger("plateau")

SURFACE = -1
OUTSIDE = -2
_SIX = ndimage.generate_binary_structure(3, 1)


class ResolutionTooCoarse(ValueError):
    pass


@dataclass(frozen=True)
class Box:
    lo: tuple
    hi: tuple

    kind = "box"

    def __post_init__(self):
        if not np.all(np.asarray(self.hi, float) > np.asarray(self.lo, float)):
            raise ValueError("box needs hi > lo on every axis")

    def bounds(self):
        return np.asarray(self.lo, float), np.asarray(self.hi, float)

    def contains_xy(self, x, y):
        return np.ones(np.broadcast(x, y).shape, dtype=bool)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "lo": list(self.lo), "hi": list(self.hi)}


@dataclass(frozen=True)
class Cylinder:
    """Vertical prism over a simple polygon, between heights ``z0 < z1``."""

    polygon: tuple
    z0: float
    z1: float

    kind = "cylinder"

    def __post_init__(self):
        if not self.z1 > self.z0:
            raise ValueError("cylinder needs z1 > z0")
        if len(self.polygon) < 3:
            raise ValueError("cylinder polygon needs at least three vertices")

    def bounds(self):
        p = np.asarray(self.polygon, float)
        lo = np.array([p[:, 0].min(), p[:, 1].min(), self.z0])
        hi = np.array([p[:, 0].max(), p[:, 1].max(), self.z1])
        return lo, hi

    def contains_xy(self, x, y):
        return shapely.contains_xy(shapely.Polygon(self.polygon), x, y)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "polygon": [list(p) for p in self.polygon], "z0": self.z0, "z1": self.z1}


def cylinder_for(mesh: SingularMesh, margin: float | None = None) -> Cylinder:
    """Prism over the widest boundary loop, padded above and below.

    The lateral wall passes through the boundary curve itself, so a band
    spanning two coaxial circles splits the prism instead of being walked
    around.
    """
    loops = mesh.boundary_loops
    if not loops:
        raise ValueError("mesh has no boundary loops to build a cylinder from")
    best, best_area = None, -1.0
    for loop in loops:
        poly = shapely.Polygon(mesh.vertices[loop, :2])
        if poly.area > best_area:
            best, best_area = loop, poly.area
    poly = mesh.vertices[best, :2]
    if shapely.Polygon(poly).exterior.is_ccw is False:
        poly = poly[::-1]
    z = mesh.vertices[:, 2]
    margin = 0.25 * (z.max() - z.min() + 1e-12) if margin is None else margin
    return Cylinder(tuple(map(tuple, poly.tolist())), float(z.min() - margin), float(z.max() + margin))


@dataclass
class CellComplex:
    domain: object
    resolution: float
    origin: np.ndarray
    labels: np.ndarray = field(repr=False)
    cell_count: int
    adjacency: list
    cell_volumes: list

    def centers(self, idx) -> np.ndarray:
        return self.origin + (np.asarray(idx) + 0.5) * self.resolution

    def index_of(self, p) -> tuple:
        i = np.floor((np.asarray(p, float) - self.origin) / self.resolution).astype(int)
        return tuple(np.clip(i, 0, np.array(self.labels.shape) - 1))

    def cell_at(self, p) -> int:
        return int(self.labels[self.index_of(p)])

    def ball_slices(self, p, r):
        lo = np.floor((np.asarray(p) - r - self.origin) / self.resolution).astype(int)
        hi = np.ceil((np.asarray(p) + r - self.origin) / self.resolution).astype(int) + 1
        lo = np.maximum(lo, 0)
        hi = np.maximum(np.minimum(hi, self.labels.shape), lo)
        sl = tuple(slice(a, b) for a, b in zip(lo, hi))
        grids = np.meshgrid(*[np.arange(a, b) for a, b in zip(lo, hi)], indexing="ij")
        c = [self.origin[k] + (grids[k] + 0.5) * self.resolution for k in range(3)]
        mask = (c[0] - p[0]) ** 2 + (c[1] - p[1]) ** 2 + (c[2] - p[2]) ** 2 <= r * r
        return sl, mask

    def cells_near(self, p, r) -> set:
        sl, mask = self.ball_slices(np.asarray(p, float), r)
        ids = self.labels[sl][mask]
        return set(int(i) for i in np.unique(ids) if i >= 0)

    def to_dict(self) -> dict:
        return {
            "domain": self.domain.to_dict(),
            "resolution": self.resolution,
            "shape": list(self.labels.shape),
            "cell_count": self.cell_count,
            "cell_volumes": list(self.cell_volumes),
            "adjacency": [list(p) for p in self.adjacency],
        }

    def dump(self, path) -> None:
        """Raw grid: three int32 dims and a float64 resolution, then int32 ids (little-endian, row-major)."""
        with open(path, "wb") as fh:
            fh.write(struct.pack("<3i", *self.labels.shape))
            fh.write(struct.pack("<d", self.resolution))
            fh.write(np.ascontiguousarray(self.labels, dtype="<i4").tobytes())


def load_grid(path) -> tuple[np.ndarray, float]:
    with open(path, "rb") as fh:
        dims = struct.unpack("<3i", fh.read(12))
        (res,) = struct.unpack("<d", fh.read(8))
        data = np.frombuffer(fh.read(), dtype="<i4")
    return data.reshape(dims), res


# -- voxelisation --------------------------------------------------------------


def _tri_box_overlap(c: np.ndarray, half: float, v0, v1, v2) -> np.ndarray:
    """Separating-axis test of triangles against cubes, one pair per row."""
    a, b, d = v0 - c, v1 - c, v2 - c
    ok = np.ones(len(c), dtype=bool)
    for k in range(3):
        mn = np.minimum(np.minimum(a[:, k], b[:, k]), d[:, k])
        mx = np.maximum(np.maximum(a[:, k], b[:, k]), d[:, k])
        ok &= (mn <= half) & (mx >= -half)
    e = [b - a, d - b, a - d]
    n = np.cross(e[0], e[1])
    r = half * np.abs(n).sum(axis=1)
    s = (n * a).sum(axis=1)
    ok &= np.abs(s) <= r
    axes = np.eye(3)
    for ei in e:
        for u in axes:
            ax = np.cross(np.broadcast_to(u, ei.shape), ei)
            pa, pb, pd = (a * ax).sum(1), (b * ax).sum(1), (d * ax).sum(1)
            r = half * np.abs(ax).sum(axis=1)
            mn = np.minimum(np.minimum(pa, pb), pd)
            mx = np.maximum(np.maximum(pa, pb), pd)
            ok &= (mn <= r) & (mx >= -r)
    return ok


def voxelize(mesh: SingularMesh, origin: np.ndarray, shape, h: float, chunk: int = 2048) -> np.ndarray:
    """Boolean grid of voxels overlapping some triangle (slightly inflated)."""
    grid = np.zeros(shape, dtype=bool)
    a, b, c = mesh.corners()
    tmin = np.minimum(np.minimum(a, b), c)
    tmax = np.maximum(np.maximum(a, b), c)
    lo = np.floor((tmin - origin) / h).astype(int) - 1
    hi = np.floor((tmax - origin) / h).astype(int) + 1
    lo = np.maximum(lo, 0)
    hi = np.minimum(hi, np.array(shape) - 1)
    keep = np.all(hi >= lo, axis=1)
    half = 0.5 * h * (1.0 + 1e-9)
    idx_all = np.flatnonzero(keep)
    for start in range(0, len(idx_all), chunk):
        ids = idx_all[start : start + chunk]
        span = hi[ids] - lo[ids] + 1
        counts = span.prod(axis=1)
        tri = np.repeat(ids, counts)
        offs = np.arange(counts.sum()) - np.repeat(np.cumsum(counts) - counts, counts)
        sp = np.repeat(span, counts, axis=0)
        ii = offs // (sp[:, 1] * sp[:, 2])
        jj = (offs // sp[:, 2]) % sp[:, 1]
        kk = offs % sp[:, 2]
        vox = np.stack([ii, jj, kk], axis=1) + lo[tri]
        centers = origin + (vox + 0.5) * h
        hit = _tri_box_overlap(centers, half, a[tri], b[tri], c[tri])
        v = vox[hit]
        grid[v[:, 0], v[:, 1], v[:, 2]] = True
    return grid


def default_resolution(mesh: SingularMesh) -> float:
    return float(mesh.edge_lengths().min()) / 5.0


def compute_cells(mesh: SingularMesh, domain=None, resolution: float | None = None, min_cell_voxels: int = 8, sentinel: bool = True) -> CellComplex:
    """Label the 6-connected components of the domain minus the surface.

    Components with fewer than ``min_cell_voxels`` voxels are staircase
    pockets trapped between wall voxels and are absorbed into the wall.
    """
    domain = cylinder_for(mesh) if domain is None else domain
    h = default_resolution(mesh) if resolution is None else float(resolution)
    if h > default_resolution(mesh) * (1 + 1e-9):
        logger.warning("resolution %g is coarser than a fifth of the shortest edge", h)
    lo, hi = domain.bounds()
    shape = tuple(max(1, int(math.ceil(s - 1e-9))) for s in (hi - lo) / h)
    origin = lo
    wall = voxelize(mesh, origin, shape, h)
    xs = origin[0] + (np.arange(shape[0]) + 0.5) * h
    ys = origin[1] + (np.arange(shape[1]) + 0.5) * h
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    inside2d = domain.contains_xy(X, Y)
    inside = np.broadcast_to(inside2d[:, :, None], shape)
    free = inside & ~wall
    raw, n = ndimage.label(free, structure=_SIX)
    sizes = np.bincount(raw.ravel(), minlength=n + 1)
    keep_ids = [i for i in range(1, n + 1) if sizes[i] >= min_cell_voxels]
    remap = np.full(n + 1, SURFACE, dtype=np.int32)
    remap[keep_ids] = np.arange(len(keep_ids), dtype=np.int32)
    labels = remap[raw]
    labels[~inside] = OUTSIDE
    count = len(keep_ids)
    vols = [float(sizes[i]) * h**3 for i in keep_ids]
    cx = CellComplex(domain, h, origin, labels, count, [], vols)
    cx.adjacency = _adjacency(labels, count)
    if sentinel:
        _sentinel_check(mesh, cx)
    return cx


def _adjacency(labels: np.ndarray, count: int, reach: int = 3) -> list:
    pairs = set()
    for i in range(count):
        grown = ndimage.binary_dilation(labels == i, structure=_SIX, iterations=reach)
        for j in np.unique(labels[grown]):
            if j > i:
                pairs.add((i, int(j)))
    return sorted(pairs)


def _sentinel_points(mesh: SingularMesh, n: int = 12):
    labels = mesh.edge_labels
    manifold = np.array([all(labels[e] is EdgeLabel.MANIFOLD for e in te) for te in mesh.triangle_edges])
    interior = mesh.labels_array(VertexLabel.INTERIOR)
    ok = manifold & interior[mesh.triangles].all(axis=1)
    idx = np.flatnonzero(ok)
    if idx.size == 0:
        return idx
    return idx[np.linspace(0, idx.size - 1, min(n, idx.size)).astype(int)]


def _sentinel_check(mesh: SingularMesh, cx: CellComplex) -> None:
    """Both sides of a few interior patches must lie in distinct local components."""
    h = cx.resolution
    normals = mesh.face_normals()
    cent = mesh.vertices[mesh.triangles].mean(axis=1)
    r = 4.0 * h
    lo, hi = cx.domain.bounds()
    for f in _sentinel_points(mesh):
        p, n = cent[f], normals[f]
        if np.any(p - r < lo) or np.any(p + r > hi):
            continue
        sl, mask = cx.ball_slices(p, r)
        local = (cx.labels[sl] >= 0) & mask
        lab, _ = ndimage.label(local, structure=_SIX)
        sides = []
        for s in (1.0, -1.0):
            for k in (2.0, 2.5, 3.0):
                q = p + s * k * h * n
                idx = np.array(cx.index_of(q)) - np.array([x.start for x in sl])
                if np.all(idx >= 0) and np.all(idx < lab.shape) and lab[tuple(idx)] > 0:
                    sides.append(lab[tuple(idx)])
                    break
        if len(sides) == 2 and sides[0] == sides[1]:
            raise ResolutionTooCoarse(f"surface leaks near triangle {int(f)} at resolution {h:g}")


# -- cell condition -------------------------------------------------------------


def _probe_vertices(mesh: SingularMesh, n_interior: int) -> np.ndarray:
    special = np.flatnonzero(mesh.labels_array(VertexLabel.YCURVE) | mesh.labels_array(VertexLabel.TPOINT))
    interior = np.flatnonzero(mesh.labels_array(VertexLabel.INTERIOR))
    if interior.size:
        pick = np.linspace(0, interior.size - 1, min(n_interior, interior.size)).astype(int)
        interior = interior[pick]
    return np.concatenate([special, interior])


def check_cell_condition(mesh: SingularMesh, cells: CellComplex, probe_radii=None, n_interior: int = 64, noise_fraction: float = 0.02) -> dict:
    """Test that every cell meets small balls around surface points in one piece.

    Probe points are all Y/T vertices and a stratified sample of interior
    vertices.  Radii are capped per point at half the distance to the mesh
    boundary and to the domain wall.  Components smaller than
    ``noise_fraction`` of the ball (and never fewer than 8 voxels) are
    treated as voxel noise.
    """
    h = cells.resolution
    if probe_radii is None:
        probe_radii = list(np.geomspace(4 * h, 12 * h, 5))
    from scipy.spatial import cKDTree

    bmask = mesh.labels_array(VertexLabel.BOUNDARY)
    btree = cKDTree(mesh.vertices[bmask]) if bmask.any() else None
    lo, hi = cells.domain.bounds()
    violations = []
    for v in _probe_vertices(mesh, n_interior):
        p = mesh.vertices[v]
        cap = np.inf
        if btree is not None:
            cap = 0.5 * btree.query(p)[0]
        cap = min(cap, 0.5 * float(np.min(np.concatenate([p - lo, hi - p]))))
        for r in probe_radii:
            if r > cap:
                continue
            sl, mask = cells.ball_slices(p, r)
            block = cells.labels[sl]
            if (block[mask] == OUTSIDE).any():
                continue
            floor = max(8, noise_fraction * mask.sum())
            for cid in np.unique(block[mask]):
                if cid < 0:
                    continue
                comp, k = ndimage.label((block == cid) & mask, structure=_SIX)
                if k < 2:
                    continue
                big = (np.bincount(comp.ravel())[1:] >= floor).sum()
                if big >= 2:
                    violations.append({"point": p.tolist(), "vertex": int(v), "radius": float(r), "cell_id": int(cid)})
    return {"ok": not violations, "violations": violations}


def cell_boundary_trace(cells: CellComplex, cell_id: int) -> list[dict]:
    """Domain-boundary patches touched by one cell.

    Faces are ``bottom``, ``top`` and ``lateral`` (for a box, the four
    side faces are reported as ``x-``, ``x+``, ``y-``, ``y+``).  Lateral
    contact is split into contiguous height intervals.
    """
    lab = cells.labels
    if not 0 <= cell_id < cells.cell_count:
        raise ValueError(f"no cell {cell_id}")
    mine = lab == cell_id
    h, o = cells.resolution, cells.origin
    out = []

    def z_runs(zmask, face):
        ks = np.flatnonzero(zmask)
        if ks.size == 0:
            return
        breaks = np.flatnonzero(np.diff(ks) > 1)
        starts = np.concatenate([[0], breaks + 1])
        ends = np.concatenate([breaks, [ks.size - 1]])
        for s, e in zip(starts, ends):
            out.append({"face": face, "z_min": float(o[2] + ks[s] * h), "z_max": float(o[2] + (ks[e] + 1) * h), "count": int(e - s + 1)})

    if mine[:, :, 0].any():
        out.append({"face": "bottom", "z_min": float(o[2]), "z_max": float(o[2]), "count": int(mine[:, :, 0].sum())})
    if mine[:, :, -1].any():
        z = float(o[2] + lab.shape[2] * h)
        out.append({"face": "top", "z_min": z, "z_max": z, "count": int(mine[:, :, -1].sum())})
    if cells.domain.kind == "box":
        for name, sl in (("x-", np.s_[0, :, :]), ("x+", np.s_[-1, :, :]), ("y-", np.s_[:, 0, :]), ("y+", np.s_[:, -1, :])):
            z_runs(mine[sl].any(axis=0), name)
    else:
        outside = lab == OUTSIDE
        pad = np.pad(outside, ((1, 1), (1, 1), (0, 0)), constant_values=True)
        near = pad[:-2, 1:-1] | pad[2:, 1:-1] | pad[1:-1, :-2] | pad[1:-1, 2:]
        z_runs((mine & near).any(axis=(0, 1)), "lateral")
    return out
