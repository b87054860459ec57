"""Non-manifold triangle meshes for soap-film (Plateau) surfaces.

A :class:`SingularMesh` is an indexed triangle soup whose edges may carry
one, two or three incident faces.  Edges with three faces are *triple*
edges and trace the Y-curves of the film; vertices where four or more
triple edges meet (with six surrounding sheets) are T-points.  No halfedge
structure is used since halfedges presume manifoldness.

Meshes are immutable: the coordinate and index arrays are made read-only
and every geometric update goes through :meth:`SingularMesh.with_vertices`,
which shares the (expensive) combinatorial data with the parent.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.sparse.csgraph import connected_components
from scipy.sparse import coo_matrix
from scipy.spatial import cKDTree

logger = logging.getLogger("plateau")


class VertexLabel(str, Enum):
    INTERIOR = "Interior"
    BOUNDARY = "Boundary"
    YCURVE = "YCurve"
    TPOINT = "TPoint"
    UNCLASSIFIED = "Unclassified"


class EdgeLabel(str, Enum):
    MANIFOLD = "Manifold"
    BOUNDARY = "Boundary"
    TRIPLE = "Triple"
    INVALID = "Invalid"


class MeshError(Exception):
    """Base class for mesh construction and query failures."""


class EmptyInput(MeshError):
    pass


class DegenerateTriangle(MeshError):
    pass


class IsolatedVertex(MeshError):
    pass


@dataclass(frozen=True)
class Diagnostic:
    """One invariant violation found by :func:`validate`."""

    kind: str
    message: str
    where: tuple = field(default_factory=tuple)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "message": self.message, "where": list(self.where)}


_EDGE_LABEL_BY_COUNT = {1: EdgeLabel.BOUNDARY, 2: EdgeLabel.MANIFOLD, 3: EdgeLabel.TRIPLE}


class _Topology:
    """Combinatorial data derived from the triangle list (shared between copies)."""

    def __init__(self, n_vertices: int, triangles: np.ndarray):
        m = len(triangles)
        sides = np.concatenate(
            [triangles[:, [0, 1]], triangles[:, [1, 2]], triangles[:, [2, 0]]]
        )
        side_tri = np.tile(np.arange(m), 3)
        keys = np.sort(sides, axis=1)
        edges, inverse, counts = np.unique(
            keys, axis=0, return_inverse=True, return_counts=True
        )
        inverse = inverse.ravel()
        order = np.argsort(inverse, kind="stable")
        splits = np.cumsum(counts)[:-1]
        self.edges = edges
        self.edge_counts = counts
        self.edge_faces = np.split(side_tri[order], splits)
        # side k of triangle t is edge triangle_edges[t, k]
        self.triangle_edges = inverse.reshape(3, m).T.copy()
        self.edge_index = {(int(a), int(b)): i for i, (a, b) in enumerate(edges)}
        self.edge_labels = [
            _EDGE_LABEL_BY_COUNT.get(int(c), EdgeLabel.INVALID) for c in counts
        ]

        vt = [[] for _ in range(n_vertices)]
        for t, tri in enumerate(triangles.tolist()):
            for v in tri:
                vt[v].append(t)
        self.vertex_triangles = [np.asarray(x, dtype=np.int64) for x in vt]
        ve = [[] for _ in range(n_vertices)]
        for e, (a, b) in enumerate(edges.tolist()):
            ve[a].append(e)
            ve[b].append(e)
        self.vertex_edges = [np.asarray(x, dtype=np.int64) for x in ve]

        self.vertex_labels = self._label_vertices(n_vertices, triangles)
        self.boundary_loops = self._boundary_loops(triangles)

    def sheets_at(self, v: int, triangles: np.ndarray) -> int:
        """Number of sheets meeting at ``v``: incident faces glued across manifold edges."""
        tris = self.vertex_triangles[v]
        if len(tris) == 0:
            return 0
        local = {int(t): i for i, t in enumerate(tris)}
        rows, cols = [], []
        for e in self.vertex_edges[v]:
            if self.edge_counts[e] == 2:
                f0, f1 = self.edge_faces[e]
                rows.append(local[int(f0)])
                cols.append(local[int(f1)])
        graph = coo_matrix(
            (np.ones(len(rows)), (rows, cols)), shape=(len(tris), len(tris))
        )
        n, _ = connected_components(graph, directed=False)
        return int(n)

    def _label_vertices(self, n_vertices, triangles):
        n_triple = np.zeros(n_vertices, dtype=np.int64)
        n_bound = np.zeros(n_vertices, dtype=np.int64)
        n_invalid = np.zeros(n_vertices, dtype=np.int64)
        for mask, acc in (
            (self.edge_counts == 3, n_triple),
            (self.edge_counts == 1, n_bound),
            (self.edge_counts >= 4, n_invalid),
        ):
            np.add.at(acc, self.edges[mask].ravel(), 1)
        labels = []
        for v in range(n_vertices):
            if len(self.vertex_triangles[v]) == 0 or n_invalid[v] > 0:
                labels.append(VertexLabel.UNCLASSIFIED)
            elif n_bound[v] > 0:
                labels.append(VertexLabel.BOUNDARY)
            elif n_triple[v] == 0:
                labels.append(VertexLabel.INTERIOR)
            elif n_triple[v] <= 2:
                labels.append(VertexLabel.YCURVE)
            elif n_triple[v] >= 4 and self.sheets_at(v, triangles) == 6:
                labels.append(VertexLabel.TPOINT)
            else:
                labels.append(VertexLabel.UNCLASSIFIED)
        return labels

    def _boundary_loops(self, triangles):
        bedges = np.flatnonzero(self.edge_counts == 1)
        self.open_chains = []
        if len(bedges) == 0:
            return []
        # direction of each boundary edge as it appears in its triangle
        directed = {}
        for e in bedges.tolist():
            t = int(self.edge_faces[e][0])
            a, b, c = triangles[t].tolist()
            key = tuple(self.edges[e].tolist())
            for u, w in ((a, b), (b, c), (c, a)):
                if tuple(sorted((u, w))) == key:
                    directed[e] = (u, w)
                    break
        adj: dict[int, list[int]] = {}
        for e in bedges.tolist():
            a, b = self.edges[e].tolist()
            adj.setdefault(a, []).append(e)
            adj.setdefault(b, []).append(e)
        for k in adj:
            adj[k].sort()
        used: set[int] = set()
        loops: list[list[int]] = []
        self.open_chains = []

        def walk(e0, start, cur, stop_at_branch):
            used.add(e0)
            loop = [start]
            while cur != start:
                loop.append(cur)
                if stop_at_branch and len(adj[cur]) != 2:
                    return loop, len(adj[cur]) == 1
                nxt = None
                for e in adj[cur]:
                    if e not in used:
                        # prefer the edge leaving ``cur`` in triangle orientation
                        if directed[e][0] == cur:
                            nxt = e
                            break
                        if nxt is None:
                            nxt = e
                if nxt is None:
                    return loop, True
                used.add(nxt)
                a, b = self.edges[nxt].tolist()
                cur = b if a == cur else a
            return loop, False

        # chains between branch vertices (where triple curves reach the boundary)
        branch = sorted(v for v, es in adj.items() if len(es) != 2)
        for v in branch:
            for e0 in adj[v]:
                if e0 in used:
                    continue
                a, b = self.edges[e0].tolist()
                chain, dangling = walk(e0, v, b if a == v else a, True)
                if dangling or len(adj[v]) == 1:
                    self.open_chains.append(len(loops))
                loops.append(chain)
        for e0 in bedges.tolist():
            if e0 in used:
                continue
            start, cur = directed[e0]
            loop, broken = walk(e0, start, cur, False)
            if broken:
                self.open_chains.append(len(loops))
            loops.append(loop)
        return loops


class SingularMesh:
    """Indexed, possibly non-manifold triangle mesh with Plateau labels.

    Parameters
    ----------
    vertices : array_like, shape (n, 3)
    triangles : array_like of int, shape (m, 3)
    """

    def __init__(self, vertices, triangles, *, _topology: _Topology | None = None):
        vertices = np.array(vertices, dtype=np.float64).reshape(-1, 3)
        triangles = np.array(triangles, dtype=np.int64).reshape(-1, 3)
        if len(triangles) == 0:
            raise EmptyInput("mesh has no triangles")
        if triangles.min() < 0 or triangles.max() >= len(vertices):
            raise MeshError("triangle references a missing vertex")
        bad = (
            (triangles[:, 0] == triangles[:, 1])
            | (triangles[:, 1] == triangles[:, 2])
            | (triangles[:, 0] == triangles[:, 2])
        )
        if bad.any():
            raise DegenerateTriangle(
                f"triangle {int(np.flatnonzero(bad)[0])} repeats a vertex"
            )
        if not np.all(np.isfinite(vertices)):
            raise MeshError("non-finite vertex coordinates")
        vertices.flags.writeable = False
        triangles.flags.writeable = False
        self.vertices = vertices
        self.triangles = triangles
        self._topo = _topology if _topology is not None else _Topology(len(vertices), triangles)

    # -- combinatorics -------------------------------------------------
    @property
    def edges(self) -> np.ndarray:
        return self._topo.edges

    @property
    def edge_counts(self) -> np.ndarray:
        return self._topo.edge_counts

    @property
    def edge_faces(self) -> list[np.ndarray]:
        return self._topo.edge_faces

    @property
    def edge_labels(self) -> list[EdgeLabel]:
        return self._topo.edge_labels

    @property
    def vertex_labels(self) -> list[VertexLabel]:
        return self._topo.vertex_labels

    @property
    def boundary_loops(self) -> list[list[int]]:
        return self._topo.boundary_loops

    @property
    def triangle_edges(self) -> np.ndarray:
        return self._topo.triangle_edges

    def vertex_triangles(self, v: int) -> np.ndarray:
        return self._topo.vertex_triangles[v]

    def vertex_edges(self, v: int) -> np.ndarray:
        return self._topo.vertex_edges[v]

    def edge_id(self, a: int, b: int) -> int:
        return self._topo.edge_index[(min(a, b), max(a, b))]

    def sheets_at(self, v: int) -> int:
        return self._topo.sheets_at(v, self.triangles)

    def labels_array(self, label: VertexLabel) -> np.ndarray:
        return np.array([lab == label for lab in self.vertex_labels], dtype=bool)

    def edges_with(self, label: EdgeLabel) -> np.ndarray:
        return np.flatnonzero([lab == label for lab in self.edge_labels])

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_triangles(self) -> int:
        return len(self.triangles)

    # -- geometry ------------------------------------------------------
    def with_vertices(self, vertices) -> "SingularMesh":
        """Same connectivity and labels, new coordinates."""
        vertices = np.asarray(vertices, dtype=np.float64)
        if vertices.shape != self.vertices.shape:
            raise MeshError("vertex array shape mismatch")
        return SingularMesh(vertices, self.triangles, _topology=self._topo)

    def corners(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        t = self.triangles
        v = self.vertices
        return v[t[:, 0]], v[t[:, 1]], v[t[:, 2]]

    def face_normals(self, unit: bool = True) -> np.ndarray:
        a, b, c = self.corners()
        n = np.cross(b - a, c - a)
        if unit:
            norm = np.linalg.norm(n, axis=1, keepdims=True)
            n = n / np.where(norm > 0, norm, 1.0)
        return n

    def triangle_areas(self) -> np.ndarray:
        return 0.5 * np.linalg.norm(self.face_normals(unit=False), axis=1)

    def area(self) -> float:
        return float(self.triangle_areas().sum())

    def edge_lengths(self) -> np.ndarray:
        e = self.edges
        return np.linalg.norm(self.vertices[e[:, 1]] - self.vertices[e[:, 0]], axis=1)

    @property
    def scale(self) -> float:
        """Bounding-box diagonal."""
        lo = self.vertices.min(axis=0)
        hi = self.vertices.max(axis=0)
        return float(np.linalg.norm(hi - lo))

    def barycentric_areas(self) -> np.ndarray:
        """One third of the incident triangle area, per vertex."""
        out = np.zeros(self.n_vertices)
        third = self.triangle_areas() / 3.0
        for k in range(3):
            np.add.at(out, self.triangles[:, k], third)
        return out

    def soup(self) -> np.ndarray:
        """Triangle soup, shape (m, 3, 3)."""
        return self.vertices[self.triangles]

    def __repr__(self) -> str:
        n_triple = int(np.sum(self.edge_counts == 3))
        return (
            f"SingularMesh(vertices={self.n_vertices}, triangles={self.n_triangles}, "
            f"triple_edges={n_triple}, loops={len(self.boundary_loops)})"
        )


def build_from_soup(triangles, weld_tolerance: float | None = None) -> SingularMesh:
    """Weld a triangle soup into a :class:`SingularMesh`.

    Corners closer than ``weld_tolerance`` are merged (union-find over all
    close pairs); the default is ``1e-9`` times the bounding-box diagonal.
    Vertices are numbered by first appearance, so rebuilding from
    ``mesh.soup()`` reproduces the mesh exactly.
    """
    soup = np.asarray(triangles, dtype=np.float64)
    if soup.size == 0:
        raise EmptyInput("empty triangle soup")
    soup = soup.reshape(-1, 3, 3)
    if not np.all(np.isfinite(soup)):
        raise MeshError("non-finite coordinates in soup")
    pts = soup.reshape(-1, 3)
    if weld_tolerance is None:
        diag = float(np.linalg.norm(pts.max(axis=0) - pts.min(axis=0)))
        weld_tolerance = 1e-9 * diag
    if weld_tolerance < 0:
        raise ValueError("weld_tolerance must be non-negative")

    # exact duplicates first, then tolerance merging between unique points
    uniq, first, inv = np.unique(pts, axis=0, return_index=True, return_inverse=True)
    inv = inv.ravel()
    parent = np.arange(len(uniq))
    if weld_tolerance > 0 and len(uniq) > 1:
        pairs = cKDTree(uniq).query_pairs(weld_tolerance, output_type="ndarray")
        if len(pairs):
            graph = coo_matrix(
                (np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])),
                shape=(len(uniq), len(uniq)),
            )
            _, parent = connected_components(graph, directed=False)
    group = parent[inv]
    # renumber groups by first appearance in the soup
    _, first_pos = np.unique(group, return_index=True)
    order = np.argsort(first_pos)
    rank = np.empty_like(order)
    rank[order] = np.arange(len(order))
    ids = rank[group]
    vertices = np.zeros((len(order), 3))
    # representative: first corner of the group in soup order
    vertices[:] = pts[np.sort(first_pos)]
    tris = ids.reshape(-1, 3)
    degenerate = (tris[:, 0] == tris[:, 1]) | (tris[:, 1] == tris[:, 2]) | (tris[:, 0] == tris[:, 2])
    if degenerate.any():
        raise DegenerateTriangle(
            f"triangle {int(np.flatnonzero(degenerate)[0])} collapses after welding"
        )
    mesh = SingularMesh(vertices, tris)
    areas = mesh.triangle_areas()
    diag = max(mesh.scale, np.finfo(float).tiny)
    if np.any(areas <= 1e-14 * diag**2):
        raise DegenerateTriangle(
            f"triangle {int(np.argmin(areas))} has zero area after welding"
        )
    if np.any(mesh.edge_counts >= 4):
        logger.warning(
            "soup has %d edges with four or more faces",
            int(np.sum(mesh.edge_counts >= 4)),
        )
    return mesh


def refine(mesh: SingularMesh) -> SingularMesh:
    """Uniform 1-to-4 midpoint subdivision.

    Old vertices keep their labels; a midpoint inherits the role of its
    parent edge (boundary, triple or manifold).
    """
    e = mesh.edges
    mids = 0.5 * (mesh.vertices[e[:, 0]] + mesh.vertices[e[:, 1]])
    n = mesh.n_vertices
    verts = np.vstack([mesh.vertices, mids])
    te = mesh.triangle_edges + n
    a, b, c = mesh.triangles.T
    ab, bc, ca = te[:, 0], te[:, 1], te[:, 2]
    tris = np.concatenate(
        [
            np.stack([a, ab, ca], axis=1),
            np.stack([ab, b, bc], axis=1),
            np.stack([ca, bc, c], axis=1),
            np.stack([ab, bc, ca], axis=1),
        ]
    )
    return SingularMesh(verts, tris)


def merge(*meshes: SingularMesh, weld_tolerance: float | None = None) -> SingularMesh:
    """Union of meshes, welding coincident vertices."""
    soup = np.concatenate([m.soup() for m in meshes])
    return build_from_soup(soup, weld_tolerance)


# -- validation -------------------------------------------------------------


def _segment_triangle_hits(p0, p1, a, b, c, eps=1e-12):
    """Vectorised segment/triangle crossing test (Moller-Trumbore)."""
    d = p1 - p0
    e1 = b - a
    e2 = c - a
    h = np.cross(d, e2)
    det = np.einsum("ij,ij->i", e1, h)
    ok = np.abs(det) > eps * (np.linalg.norm(e1, axis=1) * np.linalg.norm(e2, axis=1) * np.linalg.norm(d, axis=1) + 1e-300)
    inv = np.where(ok, 1.0 / np.where(ok, det, 1.0), 0.0)
    s = p0 - a
    u = inv * np.einsum("ij,ij->i", s, h)
    q = np.cross(s, e1)
    v = inv * np.einsum("ij,ij->i", d, q)
    t = inv * np.einsum("ij,ij->i", e2, q)
    return ok & (u >= -eps) & (v >= -eps) & (u + v <= 1 + eps) & (t >= -eps) & (t <= 1 + eps)


def find_intersections(mesh: SingularMesh, max_pairs: int | None = None) -> list[tuple[int, int]]:
    """Pairs of vertex-disjoint triangles that cross each other.

    Candidate pairs come from a proximity probe on triangle centroids; each
    candidate is confirmed with edge/triangle crossing tests.
    """
    a, b, c = mesh.corners()
    cen = (a + b + c) / 3.0
    rad = np.max(
        np.stack([np.linalg.norm(x - cen, axis=1) for x in (a, b, c)]), axis=0
    )
    pairs = cKDTree(cen).query_pairs(2.0 * float(rad.max()) * (1 + 1e-9), output_type="ndarray")
    if len(pairs) == 0:
        return []
    i, j = pairs[:, 0], pairs[:, 1]
    close = np.linalg.norm(cen[i] - cen[j], axis=1) <= rad[i] + rad[j]
    ti, tj = mesh.triangles[i], mesh.triangles[j]
    shared = (ti[:, :, None] == tj[:, None, :]).any(axis=(1, 2))
    keep = close & ~shared
    i, j = i[keep], j[keep]
    if len(i) == 0:
        return []
    hit = np.zeros(len(i), dtype=bool)
    corners = (a, b, c)
    for src, dst in ((i, j), (j, i)):
        for k in range(3):
            p0 = corners[k][src]
            p1 = corners[(k + 1) % 3][src]
            hit |= _segment_triangle_hits(p0, p1, a[dst], b[dst], c[dst])
    out = sorted(zip(i[hit].tolist(), j[hit].tolist()))
    if max_pairs is not None:
        out = out[:max_pairs]
    return [(min(p), max(p)) for p in out]


def validate(mesh: SingularMesh, check_intersections: bool = True) -> list[Diagnostic]:
    """All invariant violations of ``mesh``; empty means a valid Plateau candidate."""
    diags: list[Diagnostic] = []
    for e in np.flatnonzero(mesh.edge_counts >= 4).tolist():
        diags.append(
            Diagnostic(
                "NonPlateauIncidence",
                f"edge {tuple(mesh.edges[e].tolist())} has {int(mesh.edge_counts[e])} faces",
                tuple(mesh.edges[e].tolist()),
            )
        )
    tris = mesh.triangles
    for e in np.flatnonzero(mesh.edge_counts == 2).tolist():
        u, w = mesh.edges[e].tolist()
        signs = []
        for t in mesh.edge_faces[e].tolist():
            row = tris[t].tolist()
            iu, iw = row.index(u), row.index(w)
            signs.append(1 if (iw - iu) % 3 == 1 else -1)
        if signs[0] == signs[1]:
            diags.append(
                Diagnostic(
                    "OrientationConflict",
                    f"faces across edge {(u, w)} traverse it in the same direction",
                    (u, w),
                )
            )
    for v, tri_ids in enumerate(mesh._topo.vertex_triangles):
        if len(tri_ids) == 0:
            diags.append(Diagnostic("DanglingVertex", f"vertex {v} is in no triangle", (v,)))
    areas = mesh.triangle_areas()
    for t in np.flatnonzero(areas <= 1e-14 * mesh.scale**2).tolist():
        diags.append(Diagnostic("DegenerateTriangle", f"triangle {t} has zero area", (t,)))
    for v, lab in enumerate(mesh.vertex_labels):
        if lab == VertexLabel.UNCLASSIFIED and len(mesh.vertex_triangles(v)) > 0:
            diags.append(
                Diagnostic("UnclassifiedVertex", f"vertex {v} has no Plateau model star", (v,))
            )
    for k in mesh._topo.open_chains:
        diags.append(
            Diagnostic("OpenBoundary", f"boundary chain {k} does not close", tuple(mesh.boundary_loops[k]))
        )
    if check_intersections:
        for i, j in find_intersections(mesh, max_pairs=50):
            diags.append(
                Diagnostic(
                    "UnresolvedIntersection",
                    f"triangles {i} and {j} cross without sharing an edge",
                    (i, j),
                )
            )
    return diags
