"""Geodesic nets on the unit sphere.

A net is a set of junction points and arcs.  Each arc is a spherical
polyline; an arc may join two junctions, start at a junction and end
freely (a dangling arc), or be a closed loop with no junction at all.
Lengths are measured along great circles, ``atan2(|p x q|, p . q)`` per
segment, which is invariant under rescaling each point and therefore has
an automatically tangential gradient on the sphere.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

logger = logging.getLogger("plateau")

CLASS_TOL = 1e-3
PROBE_TOL = 1e-6


class StepTooLarge(RuntimeError):
    pass


@dataclass
class Arc:
    start: int | None
    end: int | None
    points: np.ndarray

    @property
    def closed(self) -> bool:
        return self.start is None and self.end is None


@dataclass
class GeodesicNet:
    junctions: np.ndarray
    arcs: list

    def __post_init__(self):
        self.junctions = np.asarray(self.junctions, dtype=float).reshape(-1, 3)
        for arc in self.arcs:
            arc.points = np.asarray(arc.points, dtype=float)
            if arc.start is not None:
                arc.points[0] = self.junctions[arc.start]
            if arc.end is not None:
                arc.points[-1] = self.junctions[arc.end]

    def copy(self) -> "GeodesicNet":
        return GeodesicNet(self.junctions.copy(), [Arc(a.start, a.end, a.points.copy()) for a in self.arcs])

    def rotated(self, R: np.ndarray) -> "GeodesicNet":
        return GeodesicNet(self.junctions @ R.T, [Arc(a.start, a.end, a.points @ R.T) for a in self.arcs])

    def segments(self):
        """All polyline segments as two ``(m, 3)`` arrays."""
        p, q = [], []
        for a in self.arcs:
            pts = a.points
            if a.closed:
                p.append(pts)
                q.append(np.roll(pts, -1, axis=0))
            else:
                p.append(pts[:-1])
                q.append(pts[1:])
        return np.concatenate(p), np.concatenate(q)

    def samples(self) -> np.ndarray:
        return np.concatenate([a.points for a in self.arcs])

    def arc_lengths(self) -> list[float]:
        out = []
        for a in self.arcs:
            pts = a.points
            q = np.roll(pts, -1, axis=0) if a.closed else pts[1:]
            out.append(float(_angles(pts[: len(q)], q).sum()))
        return out

    def length(self) -> float:
        return float(_angles(*self.segments()).sum())

    def degrees(self) -> list[int]:
        deg = [0] * len(self.junctions)
        for a in self.arcs:
            for j in (a.start, a.end):
                if j is not None:
                    deg[j] += 1
        return deg

    def arc_normals(self) -> list[np.ndarray]:
        return [_fit_normal(a.points) for a in self.arcs]


def _angles(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    return np.arctan2(np.linalg.norm(np.cross(p, q), axis=-1), np.einsum("ij,ij->i", p, q))


def _unit(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def _fit_normal(points: np.ndarray) -> np.ndarray:
    _, _, vt = np.linalg.svd(points, full_matrices=False)
    n = vt[-1]
    k = int(np.argmax(np.abs(n)))
    return n if n[k] > 0 else -n


def _tangent(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Unit tangent at ``p`` of the great circle toward ``q``."""
    t = q - np.einsum("...i,...i->...", p, q)[..., None] * p
    return t / np.linalg.norm(t, axis=-1, keepdims=True)


def _frame(p0: np.ndarray):
    p0 = p0 / np.linalg.norm(p0)
    helper = np.eye(3)[int(np.argmin(np.abs(p0)))]
    u = _unit(np.cross(p0, helper))
    v = np.cross(p0, u)
    return p0, u, v


# -- constructions -------------------------------------------------------------


def great_circle(normal, n: int = 128, phase: float = 0.0) -> np.ndarray:
    normal, u, v = _frame(np.asarray(normal, dtype=float))
    s = phase + 2 * np.pi * np.arange(n) / n
    return np.outer(np.cos(s), u) + np.outer(np.sin(s), v)


def make_equator(normal=(0.0, 0.0, 1.0), n: int = 128) -> GeodesicNet:
    return GeodesicNet(np.zeros((0, 3)), [Arc(None, None, great_circle(normal, n))])


def y_net_directions(p0, phase: float = 0.0) -> tuple[np.ndarray, np.ndarray]:
    p0, u, v = _frame(np.asarray(p0, dtype=float))
    ang = phase + 2 * np.pi * np.arange(3) / 3
    return p0, np.outer(np.cos(ang), u) + np.outer(np.sin(ang), v)


def make_y_net(p0=(1.0, 0.0, 0.0), phase: float = 0.0, n: int = 64) -> GeodesicNet:
    """Three half great circles from ``p0`` to ``-p0`` leaving at 120 degree angles."""
    p0, dirs = y_net_directions(p0, phase)
    s = np.pi * np.arange(n + 1) / n
    arcs = [Arc(0, 1, np.outer(np.cos(s), p0) + np.outer(np.sin(s), d)) for d in dirs]
    return GeodesicNet(np.stack([p0, -p0]), arcs)


# -- validation ----------------------------------------------------------------


def junction_tangents(net: GeodesicNet) -> list[list[np.ndarray]]:
    tans: list[list[np.ndarray]] = [[] for _ in net.junctions]
    for a in net.arcs:
        if a.start is not None:
            tans[a.start].append(_tangent(a.points[0], a.points[1]))
        if a.end is not None:
            tans[a.end].append(_tangent(a.points[-1], a.points[-2]))
    return tans


def balance_residuals(net: GeodesicNet) -> list[float]:
    return [float(np.linalg.norm(np.sum(t, axis=0))) if t else 0.0 for t in junction_tangents(net)]


def geodesy_residuals(net: GeodesicNet) -> list[float]:
    """Largest angular distance of each arc's samples from its fitted great circle."""
    out = []
    for a, n in zip(net.arcs, net.arc_normals()):
        out.append(float(np.max(np.abs(np.arcsin(np.clip(a.points @ n, -1, 1))))))
    return out


def net_validate(net: GeodesicNet, tol: float = 1e-8) -> dict:
    """Check geodesy of every arc, junction degrees and the balance of conormals.

    A free arc end counts as a junction of degree one and fails.  Degree
    two junctions pass when their two tangents cancel.
    """
    bal = balance_residuals(net)
    geo = geodesy_residuals(net)
    deg = net.degrees()
    dangling = sum(1 for a in net.arcs for j in (a.start, a.end) if j is None and not a.closed)
    ok = all(r < tol for r in bal) and all(g < tol for g in geo) and all(d >= 2 for d in deg) and dangling == 0
    radial = float(np.max(np.abs(np.linalg.norm(net.samples(), axis=1) - 1.0)))
    return {
        "ok": bool(ok),
        "balance_residuals": bal,
        "geodesy_residuals": geo,
        "junction_degrees": deg,
        "dangling_ends": dangling,
        "max_radial_error": radial,
    }


# -- length gradient -------------------------------------------------------------


@dataclass
class _Graph:
    nodes: np.ndarray
    seg: np.ndarray
    owners: list  # per arc: node index per point
    triples: np.ndarray  # (prev, node, next) for every non-junction polyline node

    @classmethod
    def of(cls, net: GeodesicNet) -> "_Graph":
        nodes = [p for p in net.junctions]
        owners, seg, triples = [], [], []
        n_junctions = len(nodes)
        for a in net.arcs:
            idx = []
            for k, p in enumerate(a.points):
                if k == 0 and a.start is not None:
                    idx.append(a.start)
                elif k == len(a.points) - 1 and a.end is not None:
                    idx.append(a.end)
                else:
                    idx.append(len(nodes))
                    nodes.append(p)
            owners.append(np.asarray(idx))
            ring = idx + [idx[0]] if a.closed else idx
            seg.extend(zip(ring[:-1], ring[1:]))
            m = len(idx)
            for k in range(m):
                if idx[k] < n_junctions:
                    continue
                if a.closed:
                    triples.append((idx[k - 1], idx[k], idx[(k + 1) % m]))
                elif 0 < k < m - 1:
                    triples.append((idx[k - 1], idx[k], idx[k + 1]))
        return cls(np.asarray(nodes, dtype=float), np.asarray(seg, dtype=int), owners, np.asarray(triples, dtype=int).reshape(-1, 3))

    def length(self, x: np.ndarray) -> float:
        return float(_angles(x[self.seg[:, 0]], x[self.seg[:, 1]]).sum())

    def gradient(self, x: np.ndarray) -> np.ndarray:
        p, q = x[self.seg[:, 0]], x[self.seg[:, 1]]
        g = np.zeros_like(x)
        np.add.at(g, self.seg[:, 0], -_tangent(p, q) / np.linalg.norm(p, axis=1)[:, None])
        np.add.at(g, self.seg[:, 1], -_tangent(q, p) / np.linalg.norm(q, axis=1)[:, None])
        return g

    def to_net(self, net: GeodesicNet, x: np.ndarray) -> GeodesicNet:
        J = len(net.junctions)
        return GeodesicNet(x[:J].copy(), [Arc(a.start, a.end, x[o].copy()) for a, o in zip(net.arcs, self.owners)])


def length_gradient(net: GeodesicNet) -> np.ndarray:
    """Gradient of total length with respect to the graph nodes (junctions first)."""
    g = _Graph.of(net)
    return g.gradient(g.nodes)


# -- relaxation ------------------------------------------------------------------


@dataclass
class NetRelaxReport:
    iterations: int
    length_history: list
    final_balance_residual: float
    classification: str
    polish_history: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "iterations": self.iterations,
            "length_history": list(self.length_history),
            "polish_history": list(self.polish_history),
            "final_balance_residual": self.final_balance_residual,
            "classification": self.classification,
        }


def regeodesize(net: GeodesicNet) -> GeodesicNet:
    """Move every arc's free samples onto its best-fit great circle, evenly spaced."""
    out = net.copy()
    for a in out.arcs:
        pts = a.points
        n = _fit_normal(pts)
        proj = _unit(pts - np.outer(pts @ n, n))
        u = proj[0]
        v = np.cross(n, u)
        ang = np.unwrap(np.arctan2(proj @ v, proj @ u))
        if a.closed:
            direction = 1.0 if ang[-1] > ang[0] else -1.0
            s = direction * 2 * np.pi * np.arange(len(pts)) / len(pts)
            a.points = np.outer(np.cos(s), u) + np.outer(np.sin(s), v)
            continue
        s = np.linspace(0.0, ang[-1], len(pts))
        new = np.outer(np.cos(s), u) + np.outer(np.sin(s), v)
        if a.start is not None:
            new[0] = pts[0]
        if a.end is not None:
            new[-1] = pts[-1]
        a.points = new
    return out


def _tangent_bases(x: np.ndarray) -> np.ndarray:
    helper = np.eye(3)[np.argmin(np.abs(x), axis=1)]
    u = _unit(np.cross(x, helper))
    v = np.cross(x, u)
    return np.stack([u, v], axis=1)  # (N, 2, 3)


def _tangential_gradient(graph: "_Graph", x: np.ndarray) -> np.ndarray:
    g = graph.gradient(x)
    return g - np.einsum("ij,ij->i", g, x)[:, None] * x


def _stationarity_residual(graph: "_Graph", x: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Tangential length gradient in fixed bases ``B`` plus equal-spacing defects along arcs.

    At an interior polyline node the gradient never has a component along
    the arc, so sliding is a null direction; the spacing equations pin it
    and make the stationary net an isolated zero of this map.
    """
    g = _tangential_gradient(graph, x)
    parts = [np.einsum("ikj,ij->ik", B, g).ravel()]
    if len(graph.triples):
        a, i, b = graph.triples.T
        parts.append(_angles(x[a], x[i]) - _angles(x[i], x[b]))
    return np.concatenate(parts)


def _stationarity_jacobian(graph: "_Graph", x: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Exact derivative of ``_stationarity_residual`` for unit nodes moved along their bases.

    For unit ``p, q`` with ``c = p . q`` and ``s = |q - c p|`` the tangent
    ``t = (q - c p) / s`` varies as
    ``dt = -((q.b) p + c b) / s + t c (q.b) / s^2`` when ``p`` moves along
    ``b`` and ``dt = (b - (p.b) p) / s + t c (p.b) / s^2`` when ``q`` does.
    """
    n = len(x)
    J = np.zeros((2 * n + len(graph.triples), 2 * n))
    dot = lambda u, v: np.einsum("ij,ij->i", u, v)  # noqa: E731
    for ii, jj in ((graph.seg[:, 0], graph.seg[:, 1]), (graph.seg[:, 1], graph.seg[:, 0])):
        p, q = x[ii], x[jj]
        c = dot(p, q)
        w = q - c[:, None] * p
        sn = np.linalg.norm(w, axis=1)
        t = w / sn[:, None]
        for k in range(2):
            b = B[ii, k]
            qb = dot(q, b)
            dt_p = -(qb[:, None] * p + c[:, None] * b) / sn[:, None] + t * (c * qb / sn**2)[:, None]
            b2 = B[jj, k]
            pb = dot(p, b2)
            dt_q = (b2 - pb[:, None] * p) / sn[:, None] + t * (c * pb / sn**2)[:, None]
            for m in range(2):
                np.add.at(J, (2 * ii + m, 2 * ii + k), -dot(B[ii, m], dt_p))
                np.add.at(J, (2 * ii + m, 2 * jj + k), -dot(B[ii, m], dt_q))
    if len(graph.triples):
        a, i, b = graph.triples.T
        rows = 2 * n + np.arange(len(a))
        t_ai, t_ia = _tangent(x[a], x[i]), _tangent(x[i], x[a])
        t_ib, t_bi = _tangent(x[i], x[b]), _tangent(x[b], x[i])
        for k in range(2):
            np.add.at(J, (rows, 2 * a + k), -dot(t_ai, B[a, k]))
            np.add.at(J, (rows, 2 * i + k), dot(t_ib - t_ia, B[i, k]))
            np.add.at(J, (rows, 2 * b + k), dot(t_bi, B[b, k]))
    return J


def _newton_polish(graph: "_Graph", x: np.ndarray, iters: int, tol: float):
    """Damped Gauss-Newton on the stationarity equations in per-node tangent coordinates.

    The minimum-norm least-squares step absorbs the global rotations;
    singular values below ``1e-7`` of the largest are dropped, because near
    convergence the rotation modes shrink to the residual's size and
    inverting them would amplify rounding.  Steps are halved until the
    residual norm drops.
    """
    history = [graph.length(x)]
    n = len(x)
    for _ in range(iters):
        B = _tangent_bases(x)
        F = _stationarity_residual(graph, x, B)
        fnorm = np.linalg.norm(F)
        if np.max(np.abs(F)) < tol:
            break
        J = _stationarity_jacobian(graph, x, B)
        delta = np.linalg.lstsq(J, -F, rcond=1e-7)[0].reshape(n, 2)
        step = np.einsum("ik,ikj->ij", delta, B)
        alpha = 1.0
        for _ in range(30):
            x_new = _unit(x + alpha * step)
            if np.linalg.norm(_stationarity_residual(graph, x_new, B)) < fnorm:
                break
            alpha *= 0.5
        else:
            break
        x = x_new
        history.append(graph.length(x))
    return x, history


def net_relax(net: GeodesicNet, steps: int = 200, step_size: float = 0.25, regeodesize_every: int = 10, polish: bool = True, polish_iters: int = 30, tol: float = 1e-10) -> tuple[GeodesicNet, NetRelaxReport]:
    """Relax a net toward stationarity on the sphere; junction combinatorics never change.

    Equators and Y-nets are saddle points of length, so plain descent drifts
    away from them.  With ``polish`` (the default) a damped Gauss-Newton solve of
    the balance equations runs first and lands on the nearby stationary net;
    its lengths are kept in ``polish_history`` and may rise slightly.  The
    descent phase that follows never lengthens the net: each step moves
    nodes along ``-step_size * h * grad`` (``h`` the mean segment angle) and
    renormalises, halving the step until the length does not grow (after 40
    halvings ``StepTooLarge`` is raised).  Every ``regeodesize_every`` steps
    the arcs are snapped to their best-fit great circles when that does not
    lengthen the net; this snap is also tried once before anything else.
    """
    graph = _Graph.of(net)
    x = graph.nodes.copy()
    snapped = _Graph.of(regeodesize(net)).nodes
    if graph.length(snapped) <= graph.length(x):
        x = snapped
    polish_history: list = []
    if polish:
        x, polish_history = _newton_polish(graph, x, polish_iters, tol)
    length = graph.length(x)
    history = [length]
    h = length / max(len(graph.seg), 1)
    eta0 = step_size * h
    it = 0
    for it in range(1, steps + 1):
        g = _tangential_gradient(graph, x)
        if np.max(np.linalg.norm(g, axis=1)) < tol:
            it -= 1
            break
        eta = eta0
        for _ in range(40):
            x_new = _unit(x - eta * g)
            l_new = graph.length(x_new)
            if l_new <= length:
                break
            eta *= 0.5
        else:
            raise StepTooLarge(f"length increased at step {it} for every trial step")
        x, length = x_new, l_new
        if regeodesize_every and it % regeodesize_every == 0:
            cand = regeodesize(graph.to_net(net, x))
            cg = _Graph.of(cand)
            l_c = cg.length(cg.nodes)
            if l_c <= length:
                x, length = cg.nodes, l_c
        history.append(length)
    out = graph.to_net(net, x)
    bal = balance_residuals(out)
    report = NetRelaxReport(it, history, max(bal) if bal else 0.0, classify(out), polish_history)
    return out, report


# -- classification and rigidity -------------------------------------------------------


def _pair_arc_distance(X: np.ndarray, P: np.ndarray, Q: np.ndarray) -> np.ndarray:
    """Angular distances from points ``X`` (m, 3) to segments ``P[.., k]Q[.., k]`` ((m|1), k, 3)."""
    n = np.cross(P, Q)
    nn = np.linalg.norm(n, axis=-1)
    good = nn > 1e-15
    n = n / np.where(good, nn, 1.0)[..., None]
    sx = np.einsum("mj,mkj->mk", X, n)
    foot = X[:, None, :] - sx[..., None] * n
    fn = np.linalg.norm(foot, axis=-1)
    foot = foot / np.where(fn > 0, fn, 1.0)[..., None]
    # foot lies between P and Q when both (P x foot) and (foot x Q) point along n
    c1 = np.einsum("mkj,mkj->mk", n, np.cross(P, foot))
    c2 = np.einsum("mkj,mkj->mk", n, np.cross(foot, Q))
    within = (c1 >= 0) & (c2 >= 0) & good
    d_line = np.abs(np.arcsin(np.clip(sx, -1, 1)))
    dp = np.arccos(np.clip(np.einsum("mj,mkj->mk", X, P), -1, 1))
    dq = np.arccos(np.clip(np.einsum("mj,mkj->mk", X, Q), -1, 1))
    return np.where(within, d_line, np.minimum(dp, dq))


def _point_arc_distance(X: np.ndarray, P: np.ndarray, Q: np.ndarray) -> np.ndarray:
    """Angular distance from each point in ``X`` to the nearest great-circle segment ``P[i]Q[i]``.

    Candidate segments come from a k-d tree over chord midpoints: the
    nearest segment's midpoint lies within ``|x - m0| + 2 max|P - Q|`` of
    ``x`` (``m0`` the nearest midpoint), so a ball query of that radius
    never misses it.
    """
    X = np.atleast_2d(X)
    if len(X) == 0:
        return np.zeros(0)
    if len(X) * len(P) <= 4096:
        return _pair_arc_distance(X, P[None], Q[None]).min(axis=1)
    from scipy.spatial import cKDTree

    tree = cKDTree(0.5 * (P + Q))
    reach = 2.0 * float(np.linalg.norm(P - Q, axis=1).max())
    d0, _ = tree.query(X)
    lists = tree.query_ball_point(X, d0 + reach * (1 + 1e-9) + 1e-15, return_sorted=False)
    counts = np.fromiter((len(c) for c in lists), dtype=np.int64, count=len(lists))
    pi = np.repeat(np.arange(len(X)), counts)
    si = np.fromiter((s for c in lists for s in c), dtype=np.int64, count=int(counts.sum()))
    d = _pair_arc_distance(X[pi], P[si][:, None], Q[si][:, None])[:, 0]
    out = np.full(len(X), np.inf)
    np.minimum.at(out, pi, d)
    return out


def _model_equator(normal, n: int = 2048) -> GeodesicNet:
    return make_equator(normal, n)


def _model_y(p0, dirs, n: int = 1024) -> GeodesicNet:
    s = np.pi * np.arange(n + 1) / n
    arcs = [Arc(0, 1, np.outer(np.cos(s), p0) + np.outer(np.sin(s), d)) for d in dirs]
    return GeodesicNet(np.stack([p0, -p0]), arcs)


def _fitted_y_model(net: GeodesicNet, j: int) -> GeodesicNet:
    p0 = net.junctions[j] / np.linalg.norm(net.junctions[j])
    tans = junction_tangents(net)[j]
    _, u, v = _frame(p0)
    ang = [math.atan2(t @ v, t @ u) for t in tans]
    phase = math.atan2(np.mean([math.sin(3 * a) for a in ang]), np.mean([math.cos(3 * a) for a in ang])) / 3
    _, dirs = y_net_directions(p0, phase)
    return _model_y(p0, dirs)


def hausdorff(net_a: GeodesicNet, net_b: GeodesicNet, mask_a=None, mask_b=None) -> float:
    """Two-sided angular distance between two nets (optionally restricted by point masks)."""
    A = net_a.samples()
    B = net_b.samples()
    Pa, Qa = net_a.segments()
    Pb, Qb = net_b.segments()
    if mask_a is not None:
        A = A[mask_a(A)]
    if mask_b is not None:
        B = B[mask_b(B)]
    d1 = _point_arc_distance(A, Pb, Qb).max() if len(A) else 0.0
    d2 = _point_arc_distance(B, Pa, Qa).max() if len(B) else 0.0
    return float(max(d1, d2))


def classify(net: GeodesicNet, tol: float = CLASS_TOL, balance_tol: float = 1e-6) -> str:
    """Equator, YNet, Other (stationary but neither) or Unresolved."""
    deg = net.degrees()
    active = [j for j, d in enumerate(deg) if d >= 3]
    if not active and all(a.closed or (a.start is not None and a.end is not None) for a in net.arcs):
        pts = net.samples()
        n = _fit_normal(pts)
        if np.max(np.abs(pts @ n)) < tol:
            return "Equator"
    if len(active) == 2 and len(net.arcs) == 3 and all(d == 3 for d in deg):
        p, q = net.junctions[active]
        if np.linalg.norm(p + q) < tol and hausdorff(net, _fitted_y_model(net, active[0])) < tol:
            return "YNet"
    bal = balance_residuals(net)
    stationary = (max(bal) if bal else 0.0) < balance_tol and max(geodesy_residuals(net)) < tol
    return "Other" if stationary else "Unresolved"


def _candidates(net: GeodesicNet, in_cap):
    pts = net.samples()
    cap_pts = pts[in_cap(pts)]
    out = []
    if len(cap_pts) >= 3:
        out.append(("Equator", _model_equator(_fit_normal(cap_pts))))
    for j, d in enumerate(net.degrees()):
        if d == 3 and in_cap(net.junctions[j : j + 1])[0]:
            out.append(("YNet", _fitted_y_model(net, j)))
    return out


def rigidity_probe(net: GeodesicNet, e, eps: float, tol: float = PROBE_TOL) -> dict:
    """Compare a net with an equator or Y-net on the cap ``{x . e > -eps}`` and on the whole sphere."""
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    e = np.asarray(e, dtype=float)
    e = e / np.linalg.norm(e)
    in_cap = lambda X: X @ e > -eps  # noqa: E731
    for kind, model in _candidates(net, in_cap):
        if hausdorff(net, model, in_cap, in_cap) <= tol:
            return {"hypothesis_met": True, "conclusion_met": hausdorff(net, model) <= tol, "model": kind}
    return {"hypothesis_met": False, "conclusion_met": False, "model": None}


# -- fixtures ------------------------------------------------------------------


def perturbed_equator(rng: np.random.Generator, noise: float = 0.01, n: int = 128) -> GeodesicNet:
    normal = _unit(rng.normal(size=3))
    pts = great_circle(normal, n, phase=rng.uniform(0, 2 * np.pi))
    return GeodesicNet(np.zeros((0, 3)), [Arc(None, None, _unit(pts + noise * rng.normal(size=pts.shape)))])


def perturbed_y_net(rng: np.random.Generator, jitter: float = 0.05, n: int = 32) -> GeodesicNet:
    """A Y-net whose junctions are moved by ``jitter`` radians; arcs stay attached and are bent to follow."""
    p0 = _unit(rng.normal(size=3))
    base = make_y_net(p0, rng.uniform(0, 2 * np.pi), n)
    moved = []
    for p in base.junctions:
        w = _unit(np.cross(p, rng.normal(size=3)))
        moved.append(math.cos(jitter) * p + math.sin(jitter) * w)
    moved = np.asarray(moved)
    arcs = []
    for a in base.arcs:
        s = np.linspace(0.0, 1.0, len(a.points))[:, None]
        d0, d1 = moved[0] - base.junctions[0], moved[1] - base.junctions[1]
        arcs.append(Arc(0, 1, _unit(a.points + (1 - s) * d0 + s * d1)))
    return GeodesicNet(moved, arcs)


def dangling_counterexample(e, eps: float, n: int = 256, tail: float = 0.3) -> GeodesicNet:
    """Great circle through ``e`` plus a short arc hanging off ``-e`` inside ``{x . e <= -eps}``."""
    e = _unit(np.asarray(e, dtype=float))
    _, u, v = _frame(e)
    s = np.pi + 2 * np.pi * np.arange(n + 1) / n  # starts and ends at -e
    loop = np.outer(np.cos(s), e) + np.outer(np.sin(s), u)
    r = np.linspace(0.0, tail, 16)
    hang = np.outer(-np.cos(r), e) + np.outer(np.sin(r), v)
    if -math.cos(tail) > -eps:
        raise ValueError("tail leaves the complement of the cap")
    return GeodesicNet(np.array([-e]), [Arc(0, 0, loop), Arc(0, None, hang)])


def net_to_dict(net: GeodesicNet) -> dict:
    return {
        "junctions": net.junctions.tolist(),
        "arcs": [{"from": a.start, "to": a.end, "samples": a.points.tolist()} for a in net.arcs],
    }
