import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from plateau import geonets as G
from plateau.repro import fd_length_check


def test_equator_length():
    net = G.make_equator((0.0, 0.0, 1.0))
    assert net.length() == pytest.approx(2 * math.pi, rel=1e-12)
    assert G.net_validate(net)["ok"]
    assert G.classify(net) == "Equator"


def test_y_net_construction():
    net = G.make_y_net((1.0, 0.0, 0.0), 0.0)
    assert net.length() == pytest.approx(3 * math.pi, rel=1e-12)
    assert max(G.balance_residuals(net)) < 1e-12
    assert G.classify(net) == "YNet"
    assert np.abs(G.length_gradient(net)[:2]).max() < 1e-12


def test_unbalanced_junction():
    p0 = np.array([1.0, 0.0, 0.0])
    dirs = [np.array([0.0, math.cos(a), math.sin(a)]) for a in np.radians([0.0, 170.0, 190.0])]
    s = np.linspace(0, np.pi, 65)
    arcs = [G.Arc(0, 1, np.outer(np.cos(s), p0) + np.outer(np.sin(s), d)) for d in dirs]
    net = G.GeodesicNet(np.stack([p0, -p0]), arcs)
    # unit tangents at 0, 170 and 190 degrees sum to 1 + 2 cos(170 deg)
    expected = abs(1 + 2 * math.cos(math.radians(170.0)))
    assert max(G.balance_residuals(net)) == pytest.approx(expected, abs=1e-6)
    assert not G.net_validate(net)["ok"]


@settings(max_examples=20, deadline=None)
@given(st.integers(min_value=0, max_value=2**31 - 1))
def test_length_gradient_matches_finite_differences(seed):
    assert fd_length_check(seed) < 1e-6


@pytest.mark.parametrize("seed", range(5))
def test_perturbed_equator_relaxes(seed):
    net0 = G.perturbed_equator(np.random.default_rng(seed))
    net, rep = G.net_relax(net0)
    assert rep.classification == "Equator"
    assert net.length() == pytest.approx(2 * math.pi, abs=1e-6)


@pytest.mark.parametrize("seed", range(5))
def test_perturbed_y_net_relaxes(seed):
    net0 = G.perturbed_y_net(np.random.default_rng(seed))
    net, rep = G.net_relax(net0)
    assert rep.classification == "YNet"
    assert net.length() == pytest.approx(3 * math.pi, abs=1e-6)
    assert rep.final_balance_residual < 1e-8
    assert all(b >= a - 1e-12 for a, b in zip(rep.length_history[1:], rep.length_history[:-1]))


def test_relaxation_is_rotation_equivariant():
    from scipy.spatial.transform import Rotation

    net0 = G.perturbed_y_net(np.random.default_rng(3))
    R = Rotation.random(random_state=4).as_matrix()
    a, _ = G.net_relax(net0)
    b, _ = G.net_relax(net0.rotated(R))
    assert np.abs(a.rotated(R).samples() - b.samples()).max() < 1e-8


def test_rigidity_probe_models():
    eq = G.make_equator((0.0, 0.0, 1.0))
    assert G.rigidity_probe(eq, (1.0, 0.0, 0.0), 0.3) == {"hypothesis_met": True, "conclusion_met": True, "model": "Equator"}
    y = G.make_y_net((0.0, 0.0, 1.0))
    probe = G.rigidity_probe(y, (0.0, 0.0, 1.0), 0.5)
    assert probe["hypothesis_met"] and probe["conclusion_met"]


@pytest.mark.parametrize("eps", [0.1, 0.3, 0.5])
def test_dangling_counterexample_is_not_stationary(eps):
    net = G.dangling_counterexample((0.0, 0.0, 1.0), eps)
    probe = G.rigidity_probe(net, (0.0, 0.0, 1.0), eps)
    assert probe["hypothesis_met"] and not probe["conclusion_met"]
    val = G.net_validate(net)
    assert not val["ok"] and val["dangling_ends"] == 1


def test_probe_eps_range():
    with pytest.raises(ValueError):
        G.rigidity_probe(G.make_equator(), (0.0, 0.0, 1.0), 1.5)


def test_point_arc_distance_pruning_is_exact():
    rng = np.random.default_rng(0)
    net = G.make_equator((0.3, 0.4, 0.5), n=2048)
    P, Q = net.segments()
    X = rng.normal(size=(500, 3))
    X /= np.linalg.norm(X, axis=1)[:, None]
    fast = G._point_arc_distance(X, P, Q)
    full = G._pair_arc_distance(X, P[None], Q[None]).min(axis=1)
    assert np.array_equal(fast, full)
    n = np.array([0.3, 0.4, 0.5]) / np.linalg.norm([0.3, 0.4, 0.5])
    assert np.allclose(fast, np.abs(np.arcsin(X @ n)), atol=1e-6)
