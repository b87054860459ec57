"""Measurements of Plateau's laws on a singular mesh.

Dihedral angles along triple edges, angles between Y-curves at T-points,
the area-ratio density ``theta(r) = area(mesh in B_r(p)) / (pi r^2)`` with
exact triangle/ball clipping, the conormal flux of boundary loops, and the
contact angle between a sheet and a plane.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .mesh import EdgeLabel, SingularMesh, VertexLabel

logger = logging.getLogger("plateau")

T_ANGLE_DEG = math.degrees(math.acos(-1.0 / 3.0))
T_DENSITY = 3.0 * math.acos(-1.0 / 3.0) / math.pi


class VerifyError(ValueError):
    pass


class NoTripleEdges(VerifyError):
    pass


class NoTPoints(VerifyError):
    pass


class InvalidLoop(VerifyError):
    pass


class NoContactCurve(VerifyError):
    pass


@dataclass
class AngleStats:
    mean: float
    max_dev: float
    angles: np.ndarray = field(repr=False)
    deviations: np.ndarray = field(repr=False)

    def to_dict(self) -> dict:
        return {"mean": self.mean, "max_dev": self.max_dev, "count": int(self.angles.size)}


# -- angles ------------------------------------------------------------------


def _edge_mean_length(mesh: SingularMesh) -> float:
    return float(mesh.edge_lengths().mean())


def _near_boundary(mesh: SingularMesh, points: np.ndarray, distance: float) -> np.ndarray:
    bmask = mesh.labels_array(VertexLabel.BOUNDARY)
    if not bmask.any():
        return np.zeros(len(points), dtype=bool)
    from scipy.spatial import cKDTree

    d, _ = cKDTree(mesh.vertices[bmask]).query(points)
    return d < distance


def _sheet_directions(mesh: SingularMesh, e: int):
    """Unit vectors in each incident face, perpendicular to edge ``e``, pointing into the face."""
    a, b = mesh.edges[e]
    x = mesh.vertices
    t = x[b] - x[a]
    t = t / np.linalg.norm(t)
    out = []
    for f in mesh.edge_faces[e]:
        c = [v for v in mesh.triangles[f] if v != a and v != b][0]
        w = x[c] - x[a]
        w = w - (w @ t) * t
        out.append(w / np.linalg.norm(w))
    return t, out


def _fan_force(mesh: SingularMesh, v: int, faces) -> np.ndarray:
    """``-dA/dx_v`` restricted to ``faces`` (all incident to ``v``)."""
    x = mesh.vertices
    force = np.zeros(3)
    for f in faces:
        tri = mesh.triangles[f]
        k = int(np.flatnonzero(tri == v)[0])
        p, q = x[tri[(k + 1) % 3]], x[tri[(k + 2) % 3]]
        n = np.cross(q - x[v], p - x[v])
        nn = np.linalg.norm(n)
        if nn > 0:
            force += 0.5 * np.cross(n / nn, q - p)
    return force


def _sheet_fans(mesh: SingularMesh, v: int) -> dict[int, list[int]]:
    """Map each face at ``v`` to the faces of its sheet around ``v``.

    Faces sharing a non-triple edge through ``v`` belong to one sheet.
    """
    faces = [int(f) for f in mesh.vertex_triangles(v)]
    parent = {f: f for f in faces}

    def find(f):
        while parent[f] != f:
            parent[f] = parent[parent[f]]
            f = parent[f]
        return f

    for e in mesh.vertex_edges(v):
        if mesh.edge_labels[e] is EdgeLabel.TRIPLE:
            continue
        fs = [int(f) for f in mesh.edge_faces[e]]
        for g in fs[1:]:
            parent[find(g)] = find(fs[0])
    groups: dict[int, list[int]] = {}
    for f in faces:
        groups.setdefault(find(f), []).append(f)
    return {f: groups[find(f)] for f in faces}


def _weak_conormals(mesh: SingularMesh, e: int, fans: dict):
    """Sheet conormals along edge ``e`` from the variational (fan) forces at its ends.

    For each face on ``e``, the pull of that face's sheet on both endpoints
    is summed and projected perpendicular to the edge.  On a stationary mesh
    these vectors balance, which is the discrete form of the conormal
    condition.
    """
    a, b = (int(v) for v in mesh.edges[e])
    x = mesh.vertices
    t = x[b] - x[a]
    t = t / np.linalg.norm(t)
    out = []
    for f in mesh.edge_faces[e]:
        f = int(f)
        w = sum(-_fan_force(mesh, v, fans[v][f]) for v in (a, b))
        w = w - (w @ t) * t
        out.append(w / np.linalg.norm(w))
    return t, out


def _cyclic_gaps(t: np.ndarray, dirs) -> np.ndarray:
    ref = dirs[0]
    other = np.cross(t, ref)
    phi = np.sort([math.atan2(d @ other, d @ ref) % (2 * math.pi) for d in dirs])
    gaps = np.diff(np.append(phi, phi[0] + 2 * math.pi))
    return np.degrees(gaps)


def dihedral_angles_along_triples(mesh: SingularMesh, exclude_boundary: bool = True, method: str = "weak") -> AngleStats:
    """Angles between the three sheets around every triple edge.

    Each triple edge contributes its three cyclic gaps, which add to 360
    degrees.  With ``method="weak"`` a sheet's direction is its variational
    conormal: the area pull of the sheet's triangle fans on the two edge
    endpoints, projected perpendicular to the edge.  With ``method="face"``
    it is the in-plane perpendicular of the single triangle on the edge,
    which carries a first-order error in the spacing across the curve.
    Edges whose midpoint lies within two mean edge lengths of a boundary
    vertex are left out unless that would leave nothing.
    """
    if method not in ("weak", "face"):
        raise ValueError("method must be 'weak' or 'face'")
    triples = mesh.edges_with(EdgeLabel.TRIPLE)
    if triples.size == 0:
        raise NoTripleEdges("mesh has no triple edges")
    if exclude_boundary:
        mids = mesh.vertices[mesh.edges[triples]].mean(axis=1)
        near = _near_boundary(mesh, mids, 2.0 * _edge_mean_length(mesh))
        if near.all():
            logger.info("all triple edges lie near the boundary; keeping them")
        else:
            triples = triples[~near]
    angles = []
    fans: dict[int, dict] = {}
    for e in triples:
        if method == "face":
            t, dirs = _sheet_directions(mesh, int(e))
        else:
            for v in mesh.edges[e]:
                if int(v) not in fans:
                    fans[int(v)] = _sheet_fans(mesh, int(v))
            t, dirs = _weak_conormals(mesh, int(e), fans)
        angles.append(_cyclic_gaps(t, dirs))
    angles = np.concatenate(angles)
    dev = np.abs(angles - 120.0)
    return AngleStats(float(angles.mean()), float(dev.max()), angles, dev)


def t_angle_stats(mesh: SingularMesh) -> AngleStats:
    """Pairwise angles between the triple edges leaving each T-point."""
    tpts = np.flatnonzero(mesh.labels_array(VertexLabel.TPOINT))
    if tpts.size == 0:
        raise NoTPoints("mesh has no T-points")
    labels = mesh.edge_labels
    angles = []
    for v in tpts:
        dirs = []
        for e in mesh.vertex_edges(int(v)):
            if labels[e] is EdgeLabel.TRIPLE:
                a, b = mesh.edges[e]
                w = mesh.vertices[b if a == v else a] - mesh.vertices[v]
                dirs.append(w / np.linalg.norm(w))
        for i in range(len(dirs)):
            for j in range(i + 1, len(dirs)):
                angles.append(math.degrees(math.acos(np.clip(dirs[i] @ dirs[j], -1, 1))))
    angles = np.asarray(angles)
    dev = np.abs(angles - T_ANGLE_DEG)
    return AngleStats(float(angles.mean()), float(dev.max()), angles, dev)


# -- density -----------------------------------------------------------------


def _signed_angle(p, q):
    cross = p[:, 0] * q[:, 1] - p[:, 1] * q[:, 0]
    dot = (p * q).sum(axis=1)
    return np.arctan2(cross, dot)


def _disk_wedge_area(A: np.ndarray, B: np.ndarray, rho: np.ndarray) -> np.ndarray:
    """Signed area of disk(0, rho) intersected with triangle (0, A, B), vectorised."""
    d = B - A
    qa = (d * d).sum(axis=1)
    qb = 2.0 * (A * d).sum(axis=1)
    qc = (A * A).sum(axis=1) - rho**2
    disc = qb * qb - 4.0 * qa * qc
    sq = np.sqrt(np.maximum(disc, 0.0))
    qa_safe = np.where(qa > 0, qa, 1.0)
    t_lo = np.clip((-qb - sq) / (2 * qa_safe), 0.0, 1.0)
    t_hi = np.clip((-qb + sq) / (2 * qa_safe), 0.0, 1.0)
    crosses = (disc > 0) & (t_lo < t_hi) & (qa > 0)
    P1 = A + t_lo[:, None] * d
    P2 = A + t_hi[:, None] * d
    half_r2 = 0.5 * rho**2
    inside = half_r2 * _signed_angle(A, P1) + 0.5 * (P1[:, 0] * P2[:, 1] - P1[:, 1] * P2[:, 0])
    inside += half_r2 * _signed_angle(P2, B)
    outside = half_r2 * _signed_angle(A, B)
    return np.where(crosses, inside, outside)


def ball_area(mesh: SingularMesh, p, r: float) -> float:
    """Exact area of the mesh inside the closed ball ``B_r(p)``."""
    p = np.asarray(p, dtype=float)
    a, b, c = mesh.corners()
    rel = [a - p, b - p, c - p]
    dist = np.stack([np.linalg.norm(x, axis=1) for x in rel], axis=1)
    full = (dist <= r).all(axis=1)
    areas = mesh.triangle_areas()
    total = float(areas[full].sum())
    n = np.cross(b - a, c - a)
    nn = np.linalg.norm(n, axis=1)
    ok = nn > 0
    n[ok] /= nn[ok, None]
    h = (rel[0] * n).sum(axis=1)
    # candidates: plane within r and triangle bounding sphere meets the ball
    cen = (a + b + c) / 3.0
    rad = np.max(np.stack([np.linalg.norm(x - cen, axis=1) for x in (a, b, c)], axis=1), axis=1)
    cand = ~full & ok & (np.abs(h) < r) & (np.linalg.norm(cen - p, axis=1) <= r + rad)
    if not cand.any():
        return total
    idx = np.flatnonzero(cand)
    rho = np.sqrt(r * r - h[idx] ** 2)
    e1 = b[idx] - a[idx]
    e1 /= np.linalg.norm(e1, axis=1)[:, None]
    e2 = np.cross(n[idx], e1)
    q = p - h[idx, None] * 0.0  # projection offset handled via rel vectors
    del q
    pts2 = []
    for x in rel:
        xi = x[idx]
        pts2.append(np.stack([(xi * e1).sum(axis=1), (xi * e2).sum(axis=1)], axis=1))
    part = np.zeros(len(idx))
    for i, j in ((0, 1), (1, 2), (2, 0)):
        part += _disk_wedge_area(pts2[i], pts2[j], rho)
    return total + float(np.abs(part).sum())


def _boundary_distance(mesh: SingularMesh, p) -> float:
    bedges = mesh.edges_with(EdgeLabel.BOUNDARY)
    if bedges.size == 0:
        return math.inf
    x = mesh.vertices
    a = x[mesh.edges[bedges, 0]]
    b = x[mesh.edges[bedges, 1]]
    d = b - a
    t = np.clip(((p - a) * d).sum(axis=1) / np.maximum((d * d).sum(axis=1), 1e-300), 0, 1)
    return float(np.min(np.linalg.norm(a + t[:, None] * d - p, axis=1)))


def density(mesh: SingularMesh, p, radii) -> list[dict]:
    """``theta(r)`` for each radius; radii whose ball reaches the boundary are flagged."""
    p = np.asarray(p, dtype=float)
    radii = [float(r) for r in radii]
    if any(r <= 0 for r in radii):
        raise ValueError("radii must be positive")
    bdist = _boundary_distance(mesh, p)
    out = []
    for r in radii:
        theta = ball_area(mesh, p, r) / (math.pi * r * r)
        exceeds = r >= bdist
        if exceeds:
            logger.info("density: radius %g reaches the mesh boundary", r)
        out.append({"point": p.tolist(), "radius": r, "theta": theta, "exceeds_mesh": exceeds})
    return out


# -- flux --------------------------------------------------------------------


def _resolve_loop(mesh: SingularMesh, loop) -> list[int]:
    if isinstance(loop, (int, np.integer)):
        loops = mesh.boundary_loops
        if not 0 <= loop < len(loops):
            raise InvalidLoop(f"loop id {loop} out of range (have {len(loops)})")
        return list(loops[loop])
    seq = [int(v) for v in loop]
    if len(seq) < 3:
        raise InvalidLoop("a loop needs at least three vertices")
    if seq[0] == seq[-1]:
        seq = seq[:-1]
    return seq


def flux(mesh: SingularMesh, loop) -> np.ndarray:
    """Length-weighted sum of outward conormals along a boundary loop.

    ``loop`` is a boundary-loop index or a vertex sequence.  Each edge's
    conormal lies in its unique face, perpendicular to the edge, pointing
    away from the face.  An edge traversed against the orientation its
    face induces contributes with a minus sign, so reversing a loop
    negates the flux.
    """
    seq = _resolve_loop(mesh, loop)
    x = mesh.vertices
    total = np.zeros(3)
    for a, b in zip(seq, seq[1:] + seq[:1]):
        try:
            e = mesh.edge_id(a, b)
        except KeyError:
            raise InvalidLoop(f"({a}, {b}) is not an edge") from None
        faces = mesh.edge_faces[e]
        if len(faces) != 1:
            raise InvalidLoop(f"edge ({a}, {b}) is not a boundary edge")
        tri = list(mesh.triangles[faces[0]])
        c = [v for v in tri if v != a and v != b][0]
        i = tri.index(a)
        sign = 1.0 if tri[(i + 1) % 3] == b else -1.0
        t = x[b] - x[a]
        length = np.linalg.norm(t)
        t /= length
        w = x[a] - x[c]
        w = w - (w @ t) * t
        total += sign * length * w / np.linalg.norm(w)
    return total


# -- contact angle -----------------------------------------------------------


def contact_angle_with_plane(mesh: SingularMesh, normal=(0.0, 0.0, 1.0), offset: float = 0.0, tol: float | None = None) -> dict:
    """Angle between the sheet on the positive side of a plane and the plane.

    At each contact edge (both ends on the plane) the sheet direction is the
    in-face perpendicular into a face lying on the positive side.  It is
    compared with the in-plane normal of the contact curve that points
    toward the centroid of the contact vertices, so a sheet leaving the
    plane vertically reads 90 degrees and one leaning outward reads more.
    """
    nrm = np.asarray(normal, dtype=float)
    nrm /= np.linalg.norm(nrm)
    tol = 1e-9 * mesh.scale if tol is None else tol
    x = mesh.vertices
    side = x @ nrm - offset
    on = np.abs(side) <= tol
    contact = np.flatnonzero(on)
    if contact.size < 2:
        raise NoContactCurve("fewer than two vertices on the plane")
    center = x[contact].mean(axis=0)
    per_vertex: dict[int, list[float]] = {}
    edges = mesh.edges
    for e in np.flatnonzero(on[edges[:, 0]] & on[edges[:, 1]]):
        a, b = edges[e]
        t = x[b] - x[a]
        t /= np.linalg.norm(t)
        m = np.cross(nrm, t)
        if (center - x[a]) @ m < 0:
            m = -m
        for f in mesh.edge_faces[e]:
            c = [v for v in mesh.triangles[f] if v != a and v != b][0]
            if side[c] <= tol:
                continue
            w = x[c] - x[a]
            w = w - (w @ t) * t
            w /= np.linalg.norm(w)
            ang = math.degrees(math.acos(np.clip(w @ m, -1.0, 1.0)))
            per_vertex.setdefault(int(a), []).append(ang)
            per_vertex.setdefault(int(b), []).append(ang)
    if not per_vertex:
        raise NoContactCurve("no sheet leaves the plane transversally")
    vals = np.array([np.mean(v) for v in per_vertex.values()])
    return {
        "plane": {"normal": nrm.tolist(), "offset": float(offset)},
        "mean_angle": float(vals.mean()),
        "min_angle": float(vals.min()),
        "max_angle": float(vals.max()),
        "n_vertices": int(vals.size),
    }


# -- report ------------------------------------------------------------------


@dataclass
class PlateauReport:
    y_angle_stats: dict | None = None
    t_angle_stats: dict | None = None
    density_samples: list = field(default_factory=list)
    flux_vectors: list = field(default_factory=list)
    flux_sum: list | None = None
    contact_angle_stats: dict | None = None

    def to_dict(self) -> dict:
        return {
            "y_angle_stats": self.y_angle_stats,
            "t_angle_stats": self.t_angle_stats,
            "density_samples": self.density_samples,
            "flux_vectors": self.flux_vectors,
            "flux_sum": self.flux_sum,
            "contact_angle_stats": self.contact_angle_stats,
        }


def default_radii(mesh: SingularMesh, n: int = 5) -> list[float]:
    h = _edge_mean_length(mesh)
    return list(np.geomspace(0.5 * h, 4.0 * h, n))


def plateau_report(mesh: SingularMesh, points=None, radii=None, plane=None) -> PlateauReport:
    """Run every applicable measurement and collect the results."""
    rep = PlateauReport()
    try:
        rep.y_angle_stats = dihedral_angles_along_triples(mesh).to_dict()
    except NoTripleEdges:
        pass
    try:
        rep.t_angle_stats = t_angle_stats(mesh).to_dict()
    except NoTPoints:
        pass
    radii = default_radii(mesh) if radii is None else radii
    for p in points or []:
        rep.density_samples.extend(density(mesh, p, radii))
    if mesh.boundary_loops:
        vecs = [flux(mesh, i) for i in range(len(mesh.boundary_loops))]
        rep.flux_vectors = [v.tolist() for v in vecs]
        rep.flux_sum = np.sum(vecs, axis=0).tolist()
    if plane is not None:
        try:
            rep.contact_angle_stats = contact_angle_with_plane(mesh, **plane)
        except NoContactCurve:
            pass
    return rep
