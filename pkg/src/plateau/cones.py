"""Tangent-cone fitting for mesh vertices.

The star of a vertex is a union of planar wedges (one per incident
triangle).  It is compared against the four model cones of a Plateau
surface -- plane ``P``, half-plane ``H``, the triple cone ``Y`` and the
tetrahedral cone ``T`` -- after an optimal rotation.  The residual is the
symmetric RMS angular distance between the two cones' links on the unit
sphere: star directions are measured against the model and model
directions against the star, both with exact point-to-sector angles, so a
star that *is* a model cone scores zero up to rounding.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations

import numpy as np
from scipy.optimize import minimize
from scipy.spatial.transform import Rotation

from .mesh import IsolatedVertex, SingularMesh

CONE_TYPES = ("P", "H", "Y", "T")
TIE_TOLERANCE = 1e-6  # rad

_TET = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], dtype=float) / np.sqrt(3.0)
_TET_PAIRS = [(i, j) for i in range(4) for j in range(i + 1, 4)]
TET_ANGLE = float(np.arccos(-1.0 / 3.0))


class AmbiguousFit(Warning):
    pass


@dataclass
class ConeApprox:
    apex: np.ndarray
    type: str
    spine_direction: np.ndarray | None
    sheet_normals: list
    fit_residual: float
    residuals: dict = field(default_factory=dict)
    ambiguous_with: str | None = None

    def to_dict(self) -> dict:
        return {
            "apex": self.apex.tolist(),
            "type": self.type,
            "spine_direction": None if self.spine_direction is None else self.spine_direction.tolist(),
            "sheet_normals": [n.tolist() for n in self.sheet_normals],
            "fit_residual": self.fit_residual,
            "residuals": dict(self.residuals),
            "ambiguous_with": self.ambiguous_with,
        }


# -- sectors -----------------------------------------------------------------
# A sector is (a, w, phi): start ray a, in-plane unit w orthogonal to a, and
# angular extent phi in (0, 2*pi].  Rays are a*cos(s) + w*sin(s), s in [0, phi].


def _unit(x):
    x = np.asarray(x, dtype=float)
    return x / np.linalg.norm(x, axis=-1, keepdims=True)


def _angle(u, v):
    cr = np.linalg.norm(np.cross(u, v), axis=-1)
    return np.arctan2(cr, np.sum(u * v, axis=-1))


def sector_distance(u: np.ndarray, a: np.ndarray, w: np.ndarray, phi: np.ndarray) -> np.ndarray:
    """Angle between unit directions ``u`` (k,3) and each sector (s,...), shape (k, s)."""
    x = u @ a.T
    y = u @ w.T
    n = np.cross(a, w)
    z = u @ n.T
    theta = np.mod(np.arctan2(y, x), 2 * np.pi)
    inside = theta <= phi[None, :] + 1e-15
    plane = np.arcsin(np.clip(np.abs(z), 0.0, 1.0))
    end = a * np.cos(phi)[:, None] + w * np.sin(phi)[:, None]
    d_a = np.arctan2(np.linalg.norm(np.cross(u[:, None, :], a[None]), axis=-1), x)
    d_e = np.arctan2(np.linalg.norm(np.cross(u[:, None, :], end[None]), axis=-1), u @ end.T)
    return np.where(inside, plane, np.minimum(d_a, d_e))


def _sample_sectors(a, w, phi, spacing=np.pi / 60):
    pts = []
    for ai, wi, p in zip(a, w, phi):
        k = max(int(np.ceil(p / spacing)), 2)
        s = np.linspace(0.0, p, k + 1)
        if p >= 2 * np.pi - 1e-12:
            s = s[:-1]
        pts.append(np.cos(s)[:, None] * ai + np.sin(s)[:, None] * wi)
    return np.concatenate(pts)


def _wedge(p, q):
    """Sector spanned by unit rays p and q (angle < pi)."""
    w = q - np.dot(p, q) * p
    w = w / np.linalg.norm(w)
    return p, w, float(_angle(p, q))


def model_sectors(kind: str):
    """Sectors of a model cone in its canonical pose."""
    e1, e2, e3 = np.eye(3)
    if kind == "P":
        return np.array([e1]), np.array([e2]), np.array([2 * np.pi])
    if kind == "H":
        return np.array([e1]), np.array([e2]), np.array([np.pi])
    if kind == "Y":
        # spine along e3; half-planes towards e1 rotated by 0, 120, 240 degrees
        ws = [np.array([np.cos(t), np.sin(t), 0.0]) for t in (0, 2 * np.pi / 3, 4 * np.pi / 3)]
        return np.array([e3] * 3), np.array(ws), np.array([np.pi] * 3)
    if kind == "T":
        a, w, phi = zip(*[_wedge(_TET[i], _TET[j]) for i, j in _TET_PAIRS])
        return np.array(a), np.array(w), np.array(phi)
    raise ValueError(kind)


_MODEL_CACHE = {}


def _model(kind):
    if kind not in _MODEL_CACHE:
        a, w, phi = model_sectors(kind)
        _MODEL_CACHE[kind] = (a, w, phi, _sample_sectors(a, w, phi))
    return _MODEL_CACHE[kind]


class _Star:
    def __init__(self, mesh: SingularMesh, v: int):
        tris = mesh.vertex_triangles(v)
        if len(tris) == 0:
            raise IsolatedVertex(f"vertex {v} has an empty star")
        p = mesh.vertices[v]
        a, w, phi = [], [], []
        rays = {}
        for t in tris.tolist():
            others = [u for u in mesh.triangles[t].tolist() if u != v]
            r0 = _unit(mesh.vertices[others[0]] - p)
            r1 = _unit(mesh.vertices[others[1]] - p)
            rays[others[0]] = r0
            rays[others[1]] = r1
            ai, wi, ph = _wedge(r0, r1)
            a.append(ai)
            w.append(wi)
            phi.append(ph)
        self.a = np.array(a)
        self.w = np.array(w)
        self.phi = np.array(phi)
        self.samples = _sample_sectors(self.a, self.w, self.phi)
        self.rays = rays
        self.triple_rays = []
        for e in mesh.vertex_edges(v).tolist():
            if mesh.edge_counts[e] == 3:
                u = [x for x in mesh.edges[e].tolist() if x != v][0]
                self.triple_rays.append(rays[u])

    def distance_to(self, u):
        return sector_distance(u, self.a, self.w, self.phi).min(axis=1)


def _residual(star: _Star, kind: str, rot: Rotation) -> float:
    a, w, phi, samples = _model(kind)
    R = rot.as_matrix()
    ra, rw = a @ R.T, w @ R.T
    d_star = sector_distance(star.samples, ra, rw, phi).min(axis=1)
    d_model = star.distance_to(samples @ R.T)
    return float(np.sqrt(0.5 * (np.mean(d_star**2) + np.mean(d_model**2))))


def _frame(x, y):
    """Rotation taking e1 -> x and (e1, e2)-plane to span(x, y)."""
    x = _unit(x)
    y = y - np.dot(x, y) * x
    ny = np.linalg.norm(y)
    if ny < 1e-12:
        y = np.cross(x, [1.0, 0, 0]) if abs(x[0]) < 0.9 else np.cross(x, [0, 1.0, 0])
        ny = np.linalg.norm(y)
    y = y / ny
    return Rotation.from_matrix(np.column_stack([x, y, np.cross(x, y)]))


def _initial_rotations(star: _Star, kind: str) -> list[Rotation]:
    s = star.samples
    _, _, vt = np.linalg.svd(s, full_matrices=False)
    normal = vt[2]
    inits = []
    if kind == "P":
        inits.append(_frame(vt[0], vt[1]))
    elif kind == "H":
        m = s.mean(axis=0)
        m = m - np.dot(m, normal) * normal
        if np.linalg.norm(m) < 1e-12:
            m = vt[0]
        # model H spans e1 (boundary line) and e2 (interior direction)
        edge = np.cross(m, normal)
        inits.append(_frame(edge, m))
        inits.append(_frame(-edge, m))
    elif kind == "Y":
        spines = list(star.triple_rays) + [vt[0], vt[1], vt[2]]
        spines += list(star.rays.values())[:12]
        for sp in spines:
            sp = _unit(sp)
            perp = s - np.outer(s @ sp, sp)
            keep = np.linalg.norm(perp, axis=1) > 1e-6
            if not keep.any():
                continue
            perp = _unit(perp[keep])
            ref = perp[0]
            ref2 = np.cross(sp, ref)
            ang = np.arctan2(perp @ ref2, perp @ ref)
            best = None
            for phase in np.unique(np.round(np.mod(ang, 2 * np.pi / 3), 10))[:64]:
                diff = np.mod(ang - phase + np.pi / 3, 2 * np.pi / 3) - np.pi / 3
                cost = float(np.sum(diff**2))
                if best is None or cost < best[0]:
                    best = (cost, phase)
            phase = best[1]
            x = np.cos(phase) * ref + np.sin(phase) * ref2
            # canonical: e3 -> spine, e1 -> first half-plane direction
            M = np.column_stack([x, np.cross(sp, x), sp])
            inits.append(Rotation.from_matrix(M))
    elif kind == "T":
        cand = list(star.triple_rays) if len(star.triple_rays) >= 2 else list(star.rays.values())
        cand = cand[:8]
        tet_rot = Rotation.align_vectors
        for p, q in permutations(range(len(cand)), 2):
            ang = _angle(cand[p], cand[q])
            if abs(ang - TET_ANGLE) > 0.5:
                continue
            rot, _ = tet_rot(
                np.array([cand[p], cand[q]]), np.array([_TET[0], _TET[1]]), weights=[1e3, 1.0]
            )
            inits.append(rot)
            if len(inits) >= 24:
                break
    rng = np.random.default_rng(12345)
    inits.extend(Rotation.random(4, random_state=rng))
    return inits


def _polish(star: _Star, kind: str, r0: Rotation, res0: float):
    if res0 <= 1e-13:
        return res0, r0
    opt = minimize(
        lambda x: _residual(star, kind, Rotation.from_rotvec(x) * r0),
        np.zeros(3),
        method="Powell",
        options={"xtol": 1e-6, "ftol": 1e-10, "maxfev": 600},
    )
    if opt.fun < res0:
        return float(opt.fun), Rotation.from_rotvec(opt.x) * r0
    return res0, r0


def _fit_all(star: _Star, types) -> dict:
    seeds = {}
    for kind in types:
        inits = _initial_rotations(star, kind)
        seeds[kind] = min(((_residual(star, kind, r), i, r) for i, r in enumerate(inits)), key=lambda x: x[:2])
    fits = {}
    best = np.inf
    for kind in sorted(types, key=lambda k: seeds[k][0]):
        res0, _, r0 = seeds[kind]
        # a seed this far behind cannot overtake the leader after polishing
        if res0 > best + 0.25:
            fits[kind] = (res0, r0)
            continue
        fits[kind] = _polish(star, kind, r0, res0)
        best = min(best, fits[kind][0])
    return fits


def classify_vertex(mesh: SingularMesh, v: int, types=CONE_TYPES) -> ConeApprox:
    """Best model cone for the star of vertex ``v``.

    Each requested model is fitted after optimal rotation; the smallest
    residual wins.  When two types are within ``TIE_TOLERANCE`` the
    lower-index type is chosen and the other is reported in
    ``ambiguous_with``.
    """
    if not 0 <= v < mesh.n_vertices:
        raise IndexError(v)
    star = _Star(mesh, v)
    fits = _fit_all(star, types)
    residuals = {k: fits[k][0] for k in types}
    ranked = sorted(types, key=lambda k: (residuals[k], CONE_TYPES.index(k)))
    kind = ranked[0]
    ambiguous = None
    for other in ranked[1:]:
        if residuals[other] - residuals[kind] < TIE_TOLERANCE:
            if CONE_TYPES.index(other) < CONE_TYPES.index(kind):
                kind, other = other, kind
            ambiguous = other
            break
    res, rot = fits[kind]
    R = rot.as_matrix()
    a, w, phi = model_sectors(kind)
    normals = [_unit(np.cross(ai, wi)) for ai, wi in zip(a @ R.T, w @ R.T)]
    if kind in ("P", "H"):
        normals = normals[:1]
    spine = None
    if kind == "Y":
        spine = R[:, 2].copy()
    return ConeApprox(
        apex=mesh.vertices[v].copy(),
        type=kind,
        spine_direction=spine,
        sheet_normals=normals,
        fit_residual=float(res),
        residuals=residuals,
        ambiguous_with=ambiguous,
    )
