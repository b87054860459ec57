"""Triangulated samples of the analytic surfaces and of the model cones."""

from __future__ import annotations

import math

import numpy as np

from .catenoids import CatenoidSolution, DiskPair, YCatenoidSolution, H0
from .mesh import SingularMesh, VertexLabel, build_from_soup


class ResolutionTooCoarse(ValueError):
    pass


class _Builder:
    def __init__(self):
        self.points: list[np.ndarray] = []
        self.tris: list[tuple[int, int, int]] = []

    def add(self, p) -> int:
        self.points.append(np.asarray(p, dtype=float))
        return len(self.points) - 1

    def add_many(self, pts) -> list[int]:
        return [self.add(p) for p in pts]

    def tri(self, a, b, c):
        self.tris.append((a, b, c))

    def mesh(self) -> SingularMesh:
        return SingularMesh(np.array(self.points), np.array(self.tris))


def _ring_strip(b: _Builder, inner, inner_ang, outer, outer_ang, flip=False):
    """Zip two closed concentric rings (angles in turns, increasing)."""
    ni, no = len(inner), len(outer)
    i = j = 0
    while i < ni or j < no:
        next_i = inner_ang[(i + 1) % ni] + (1.0 if i + 1 >= ni else 0.0)
        next_o = outer_ang[(j + 1) % no] + (1.0 if j + 1 >= no else 0.0)
        if i >= ni or (j < no and next_o <= next_i):
            t = (inner[i % ni], outer[j % no], outer[(j + 1) % no])
            j += 1
        else:
            t = (inner[i % ni], outer[j % no], inner[(i + 1) % ni])
            i += 1
        b.tri(*(t[::-1] if flip else t))


def _disk_into(b: _Builder, radius, n_boundary, z=0.0, flip=False, outer_ids=None, center=(0.0, 0.0)):
    """Concentric-ring disk; the outer ring has ``n_boundary`` points at angles 2 pi j / n."""
    cx, cy = center
    spacing = 2 * math.pi * radius / n_boundary
    K = max(1, int(math.ceil(radius / spacing)))
    centre = b.add([cx, cy, z])
    prev_ids = None
    prev_ang = None
    for k in range(1, K + 1):
        r = radius * k / K
        if k == K:
            n_k = n_boundary
            ang = np.arange(n_k) / n_k
        else:
            n_k = max(6, int(round(n_boundary * k / K)))
            ang = (np.arange(n_k) + 0.5 * (k % 2)) / n_k
        if k == K and outer_ids is not None:
            ids = list(outer_ids)
        else:
            pts = np.column_stack(
                [cx + r * np.cos(2 * np.pi * ang), cy + r * np.sin(2 * np.pi * ang), np.full(n_k, z)]
            )
            ids = b.add_many(pts)
        if prev_ids is None:
            for j in range(n_k):
                t = (centre, ids[j], ids[(j + 1) % n_k])
                b.tri(*(t[::-1] if flip else t))
        else:
            _ring_strip(b, prev_ids, prev_ang, ids, ang, flip=flip)
        prev_ids, prev_ang = ids, ang
    return prev_ids


def flat_disk(radius: float = 1.0, n_boundary: int = 32, z: float = 0.0) -> SingularMesh:
    """Triangulated horizontal disk."""
    b = _Builder()
    _disk_into(b, radius, n_boundary, z)
    return b.mesh()


def _profile_heights(arclength_to_z, total_s, n, grading=1.0):
    s = total_s * np.linspace(0.0, 1.0, n + 1) ** grading
    return arclength_to_z(s)


def _sheet_rows(b: _Builder, radii, heights, n_theta, first_row=None):
    theta = 2 * np.pi * np.arange(n_theta) / n_theta
    rows = []
    for k, (r, z) in enumerate(zip(radii, heights)):
        if k == 0 and first_row is not None:
            rows.append(list(first_row))
            continue
        pts = np.column_stack([r * np.cos(theta), r * np.sin(theta), np.full(n_theta, z)])
        rows.append(b.add_many(pts))
    return rows


def _quads(b: _Builder, rows, flip=False):
    n = len(rows[0])
    for lo, hi in zip(rows[:-1], rows[1:]):
        for j in range(n):
            j1 = (j + 1) % n
            t1 = (lo[j], lo[j1], hi[j1])
            t2 = (lo[j], hi[j1], hi[j])
            if flip:
                t1, t2 = t1[::-1], t2[::-1]
            b.tri(*t1)
            b.tri(*t2)


def _mirror_sheet(b: _Builder, radii, heights, n_theta, shared_row, flip):
    """Sheet at heights -heights sharing ``shared_row`` at height 0; mirror triangulation."""
    rows = _sheet_rows(b, radii, -np.asarray(heights), n_theta, first_row=shared_row)
    _quads(b, rows, flip=flip)
    return rows


def sample_surface(solution, n_theta: int = 64, n_axial: int = 32, grading: float = 1.0) -> SingularMesh:
    """Triangulate a census entry.

    Sheets are sampled uniformly in meridian arc length; the lower half is
    the exact mirror image of the upper half, so the samples are symmetric
    under ``x3 -> -x3``.  ``n_axial`` counts rows over the full height.
    ``grading > 1`` places row ``k`` of ``n`` at arc length ``(k/n)**grading``
    of the sheet, clustering rows near the waist (or the triple circle).
    """
    if n_theta < 8 or n_axial < 2:
        raise ResolutionTooCoarse("need n_theta >= 8 and n_axial >= 2")
    if grading < 1.0:
        raise ValueError("grading must be >= 1")
    half = max(1, int(math.ceil(n_axial / 2)))
    b = _Builder()
    if isinstance(solution, DiskPair):
        _disk_into(b, solution.R, n_theta, z=solution.d)
        _disk_into(b, solution.R, n_theta, z=-solution.d, flip=True)
        return b.mesh()
    if isinstance(solution, CatenoidSolution):
        c, d = solution.c, solution.d
        total = c * math.sinh(d / c)
        z = _profile_heights(lambda s: c * np.arcsinh(s / c), total, half, grading)
        r = c * np.cosh(z / c)
        upper = _sheet_rows(b, r, z, n_theta)
        _quads(b, upper)
        _mirror_sheet(b, r, z, n_theta, upper[0], flip=True)
        return b.mesh()
    if isinstance(solution, YCatenoidSolution):
        lam, d = solution.lam, solution.d
        s0 = math.sinh(H0)
        total = lam * (math.sinh(d / lam + H0) - s0)
        z = _profile_heights(lambda s: lam * (np.arcsinh(s / lam + s0) - H0), total, half, grading)
        z[0] = 0.0
        r = lam * np.cosh(z / lam + H0)
        upper = _sheet_rows(b, r, z, n_theta)
        _quads(b, upper)
        _mirror_sheet(b, r, z, n_theta, upper[0], flip=True)
        _disk_into(b, solution.disk_radius, n_theta, z=0.0, outer_ids=upper[0])
        return b.mesh()
    raise TypeError(f"cannot sample {type(solution).__name__}")


# -- model cones ---------------------------------------------------------------


def flat_y_cone(length: float = 1.0, n: int = 8, spine=(0.0, 0.0, 1.0), angles=(0.0, 120.0, 240.0)) -> SingularMesh:
    """Three half-planes (rectangles) sharing a spine segment of length ``2 length``.

    ``angles`` are the directions of the half-planes around the spine, in
    degrees; the default is the 120-degree Y cone.
    """
    spine = np.asarray(spine, float)
    spine = spine / np.linalg.norm(spine)
    ref = np.cross(spine, [1.0, 0, 0]) if abs(spine[0]) < 0.9 else np.cross(spine, [0, 1.0, 0])
    ref /= np.linalg.norm(ref)
    ref2 = np.cross(spine, ref)
    b = _Builder()
    s = np.linspace(-length, length, 2 * n + 1)
    spine_ids = b.add_many(np.outer(s, spine))
    w = np.linspace(0.0, length, n + 1)
    for ang in angles:
        t = math.radians(ang)
        dirn = math.cos(t) * ref + math.sin(t) * ref2
        grid = [spine_ids]
        for wk in w[1:]:
            grid.append(b.add_many(np.outer(s, spine) + wk * dirn))
        for k in range(n):
            for i in range(2 * n):
                a0, a1 = grid[k][i], grid[k][i + 1]
                c0, c1 = grid[k + 1][i], grid[k + 1][i + 1]
                b.tri(a0, a1, c1)
                b.tri(a0, c1, c0)
    return b.mesh()


TET_DIRECTIONS = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], float) / math.sqrt(3)


def t_cone(radius: float = 1.0, n_radial: int = 8, n_arc: int = 8) -> SingularMesh:
    """Cone over the edges of a regular tetrahedron: six planar sectors on four rays."""
    b = _Builder()
    apex = b.add([0.0, 0.0, 0.0])
    rho = radius * np.arange(1, n_radial + 1) / n_radial
    rays = [b.add_many(np.outer(rho, d)) for d in TET_DIRECTIONS]
    for i in range(4):
        for j in range(i + 1, 4):
            p, q = TET_DIRECTIONS[i], TET_DIRECTIONS[j]
            phi = math.acos(float(np.dot(p, q)))
            w = q - np.dot(p, q) * p
            w /= np.linalg.norm(w)
            cols = [rays[i]]
            for k in range(1, n_arc):
                s = phi * k / n_arc
                dirn = math.cos(s) * p + math.sin(s) * w
                cols.append(b.add_many(np.outer(rho, dirn)))
            cols.append(rays[j])
            for k in range(n_arc):
                b.tri(apex, cols[k][0], cols[k + 1][0])
                for m in range(n_radial - 1):
                    a0, a1 = cols[k][m], cols[k][m + 1]
                    c0, c1 = cols[k + 1][m], cols[k + 1][m + 1]
                    b.tri(a0, a1, c1)
                    b.tri(a0, c1, c0)
    return b.mesh()


def sphere_octant(n: int = 16, radius: float = 1.0) -> SingularMesh:
    """Subdivided octahedron face projected onto the sphere."""
    e = np.eye(3)
    b = _Builder()
    ids = {}
    for i in range(n + 1):
        for j in range(n + 1 - i):
            k = n - i - j
            p = (i * e[0] + j * e[1] + k * e[2]) / n
            ids[i, j] = b.add(radius * p / np.linalg.norm(p))
    for i in range(n):
        for j in range(n - i):
            b.tri(ids[i, j], ids[i + 1, j], ids[i, j + 1])
            if i + j + 2 <= n:
                b.tri(ids[i + 1, j], ids[i + 1, j + 1], ids[i, j + 1])
    return b.mesh()


def crossing_quads(size: float = 1.0, n: int = 2) -> SingularMesh:
    """Two planar patches crossing transversally without sharing any edge."""
    b = _Builder()
    g = np.linspace(-size, size, n + 1)
    for plane in (0, 1):
        ids = {}
        for i, u in enumerate(g):
            for j, v in enumerate(g):
                p = [u, v, 0.0] if plane == 0 else [u + 0.013 * size, 0.0, v]
                ids[i, j] = b.add(p)
        for i in range(n):
            for j in range(n):
                b.tri(ids[i, j], ids[i + 1, j], ids[i + 1, j + 1])
                b.tri(ids[i, j], ids[i + 1, j + 1], ids[i, j + 1])
    return b.mesh()


def tilted_disks(radius: float = 1.0, n_boundary: int = 32) -> SingularMesh:
    """Two non-coaxial disks with different tilts (no horizontal mirror plane)."""
    from scipy.spatial.transform import Rotation

    m1 = flat_disk(radius, n_boundary)
    m2 = flat_disk(radius, n_boundary)
    v1 = Rotation.from_euler("x", 20, degrees=True).apply(m1.vertices) + [0.0, 0.0, 0.6]
    v2 = Rotation.from_euler("y", -10, degrees=True).apply(m2.vertices) + [0.3, 0.1, -0.6]
    return SingularMesh(
        np.vstack([v1, v2]), np.vstack([m1.triangles, m2.triangles + len(v1)])
    )


def nonsimple_bigraph(n_boundary: int = 48, holes=((-0.45, 0.0, 0.22), (0.45, 0.0, 0.22)), height: float = 1.0) -> SingularMesh:
    """Bi-graph whose mid-plane slice mixes regular and singular points.

    The upper sheet is a graph over the unit disk minus two holes, at height
    0 on both hole rims and ``height`` on the outer circle; the lower sheet
    is its mirror image.  Across the first hole the sheets meet along a
    regular curve (nothing fills the hole), while the second hole is filled
    by a flat disk, making its rim a triple curve.  The region above the
    upper sheet reaches the region below the lower sheet through the first
    hole, so both faces of the flat disk see the same complementary cell.
    """
    from scipy.spatial import Delaunay

    (x1, y1, r1), (x2, y2, r2) = holes
    spacing = 2 * math.pi / n_boundary
    pts = []
    th = 2 * np.pi * np.arange(n_boundary) / n_boundary
    pts.append(np.column_stack([np.cos(th), np.sin(th)]))
    hole_pts = []
    for cx, cy, r in holes:
        m = max(12, int(round(2 * math.pi * r / spacing)))
        t = 2 * np.pi * np.arange(m) / m
        hp = np.column_stack([cx + r * np.cos(t), cy + r * np.sin(t)])
        hole_pts.append(hp)
        pts.append(hp)
    # interior lattice
    g = np.arange(-1.0, 1.0 + 1e-9, spacing * 0.9)
    X, Y = np.meshgrid(g, g)
    cand = np.column_stack([X.ravel(), Y.ravel()])
    cand[:, 0] += 0.5 * spacing * 0.9 * (np.round((cand[:, 1] + 1) / (spacing * 0.9)) % 2)
    keep = np.linalg.norm(cand, axis=1) < 1 - 0.6 * spacing
    for cx, cy, r in holes:
        keep &= np.hypot(cand[:, 0] - cx, cand[:, 1] - cy) > r + 0.6 * spacing
    pts.append(cand[keep])
    P = np.vstack(pts)
    tri = Delaunay(P).simplices
    cen = P[tri].mean(axis=1)
    inside = np.ones(len(tri), bool)
    for cx, cy, r in holes:
        inside &= np.hypot(cen[:, 0] - cx, cen[:, 1] - cy) > r
    tri = tri[inside]
    # orient counter-clockwise
    a, bb, c = P[tri[:, 0]], P[tri[:, 1]], P[tri[:, 2]]
    cr = (bb[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) - (bb[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0])
    tri[cr < 0] = tri[cr < 0][:, [0, 2, 1]]

    def height_fn(q):
        dist = np.min(
            np.stack([np.hypot(q[:, 0] - cx, q[:, 1] - cy) - r for cx, cy, r in holes]), axis=0
        )
        dist = np.maximum(dist, 0.0)
        out = np.maximum(1.0 - np.hypot(q[:, 0], q[:, 1]), 0.0)
        return height * np.sqrt(dist / (dist + out + 1e-300))

    z = height_fn(P)
    z[: n_boundary] = height
    on_rim = np.zeros(len(P), bool)
    off = n_boundary
    for hp in hole_pts:
        on_rim[off : off + len(hp)] = True
        off += len(hp)
    z[on_rim] = 0.0
    n = len(P)
    upper = np.column_stack([P, z])
    lower = np.column_stack([P, -z])
    verts = np.vstack([upper, lower])
    # identify rim vertices of the lower sheet with the upper ones
    remap = np.arange(2 * n)
    remap[n:][on_rim] = np.flatnonzero(on_rim)
    tris_u = tri
    tris_l = remap[tri[:, [0, 2, 1]] + n]
    b = _Builder()
    b.points = list(verts)
    b.tris = [tuple(t) for t in np.vstack([tris_u, tris_l]).tolist()]
    # fill the second hole with a flat disk welded to its rim
    rim2 = list(range(n_boundary + len(hole_pts[0]), n_boundary + len(hole_pts[0]) + len(hole_pts[1])))
    _disk_into(b, r2, len(rim2), z=0.0, outer_ids=rim2, center=(x2, y2))
    mesh = b.mesh()
    used = np.unique(mesh.triangles)
    remap2 = -np.ones(mesh.n_vertices, int)
    remap2[used] = np.arange(len(used))
    return SingularMesh(mesh.vertices[used], remap2[mesh.triangles])


def perturb(mesh: SingularMesh, amplitude: float, rng: np.random.Generator, pin_boundary: bool = True) -> SingularMesh:
    """Gaussian displacement of standard deviation ``amplitude`` on free vertices."""
    noise = rng.normal(scale=amplitude, size=mesh.vertices.shape)
    if pin_boundary:
        noise[mesh.labels_array(VertexLabel.BOUNDARY)] = 0.0
    return mesh.with_vertices(mesh.vertices + noise)


def soup_roundtrip(mesh: SingularMesh) -> SingularMesh:
    return build_from_soup(mesh.soup())
