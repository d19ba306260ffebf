"""Cross-module invariants checked on randomized networks."""

import numpy as np
import pytest

from idealflow import (
    augment_with_cloud,
    ideal_flow,
    incidence,
    is_premagic,
    is_strongly_connected,
    normalize_min,
    propagate_flow,
    scale,
    standard_flow,
    stationary,
    uniform_transition,
)

from conftest import random_strongly_connected


def test_flow_total_equals_kappa():
    rng = np.random.default_rng(101)
    for _ in range(50):
        net = random_strongly_connected(rng, n_max=25)
        t = uniform_transition(net)
        kappa = float(rng.uniform(0.1, 1e5))
        pi = stationary(t, kappa)
        f = ideal_flow(pi, t)
        assert f.sum() == pytest.approx(kappa, rel=1e-10)
        assert pi.sum() == pytest.approx(kappa, rel=1e-12)
        assert np.allclose(t.sum(axis=1), 1.0, atol=1e-12)


def test_flow_support_equals_arc_set():
    rng = np.random.default_rng(103)
    for _ in range(30):
        net = random_strongly_connected(rng, n_max=20)
        t = uniform_transition(net)
        f = ideal_flow(stationary(t, 1.0), t)
        assert np.array_equal(f > 0, net.adjacency() > 0)


def test_three_route_agreement():
    rng = np.random.default_rng(107)
    for _ in range(25):
        net = random_strongly_connected(rng, n_max=18)
        t = uniform_transition(net)
        exact = normalize_min(ideal_flow(stationary(t, 1.0), t))
        assert np.abs(standard_flow(net) - exact).max() <= 1e-8
        assert np.abs(propagate_flow(net, 0) - exact).max() <= 1e-8


def test_scaled_flows_stay_premagic():
    rng = np.random.default_rng(109)
    for _ in range(30):
        net = random_strongly_connected(rng, n_max=25)
        t = uniform_transition(net)
        f = ideal_flow(stationary(t, 1.0), t)
        scaled = scale(f, float(10 ** rng.uniform(-4, 4)))
        assert is_premagic(scaled).ok


def test_augmentation_then_solve_always_works():
    rng = np.random.default_rng(113)
    for _ in range(40):
        n = int(rng.integers(2, 15))
        arcs = [
            (int(i), int(j))
            for i in range(n)
            for j in range(n)
            if i != j and rng.random() < 0.15
        ]
        from idealflow import DirectedNetwork

        aug = augment_with_cloud(DirectedNetwork.from_arcs(n, arcs))
        assert is_strongly_connected(aug.network)
        t = uniform_transition(aug.network)
        f = ideal_flow(stationary(t, 1.0), t)
        assert is_premagic(f).ok


def test_incidence_null_vector_is_flow():
    # The flow's per-arc values satisfy B e = 0, tying both solver routes together.
    rng = np.random.default_rng(127)
    for _ in range(20):
        net = random_strongly_connected(rng, n_max=15)
        t = uniform_transition(net)
        f = ideal_flow(stationary(t, 1.0), t)
        e = np.array([f[a.tail, a.head] for a in net.arcs])
        assert np.abs(incidence(net).astype(float) @ e).max() <= 1e-12
