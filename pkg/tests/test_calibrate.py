import numpy as np
import pytest

from idealflow import (
    DirectedNetwork,
    augment_with_cloud,
    extend_observed_to_augmented,
    fit_scale,
    ideal_flow,
    stationary,
    uniform_transition,
    unit_ideal_flow,
)
from idealflow.errors import DanglingNode, DimensionMismatch, ZeroUnitFlow

from conftest import DEMO5_FLOW, DEMO5_TOTAL, random_strongly_connected


class TestUnitIdealFlow:
    def test_demo_flow_scaled_to_one(self):
        unit = unit_ideal_flow(DEMO5_FLOW)
        assert np.allclose(unit, DEMO5_FLOW / DEMO5_TOTAL, atol=1e-12)
        assert unit.sum() == pytest.approx(1.0, rel=1e-12)

    def test_premagic_input_reproduced_exactly(self):
        rng = np.random.default_rng(67)
        for _ in range(10):
            net = random_strongly_connected(rng, n_max=12)
            t = uniform_transition(net)
            f = ideal_flow(stationary(t, float(rng.uniform(10, 1e4))), t)
            unit = unit_ideal_flow(f)
            assert np.abs(f.sum() * unit - f).max() <= 1e-8 * f.max()

    def test_zero_outflow_row_rejected(self):
        bad = DEMO5_FLOW.copy()
        bad[1, :] = 0.0
        with pytest.raises(DanglingNode):
            unit_ideal_flow(bad)


class TestFitScale:
    def test_exact_multiple(self):
        unit = DEMO5_FLOW / DEMO5_FLOW.sum()
        result = fit_scale(unit, 5.0 * unit)
        assert result.kappa == pytest.approx(5.0, rel=1e-12)
        assert result.sse <= 1e-20

    def test_demo_self_consistency(self):
        unit = unit_ideal_flow(DEMO5_FLOW)
        result = fit_scale(unit, DEMO5_FLOW)
        assert result.kappa == pytest.approx(DEMO5_TOTAL, rel=1e-12)
        assert result.mse <= 1e-16
        assert all(abs(r.residual) <= 1e-8 for r in result.residuals)

    def test_self_consistency_on_random_flows(self):
        rng = np.random.default_rng(71)
        for _ in range(10):
            net = random_strongly_connected(rng, n_max=15)
            t = uniform_transition(net)
            f = ideal_flow(stationary(t, float(rng.uniform(1, 1e5))), t)
            result = fit_scale(unit_ideal_flow(f), f)
            assert result.kappa == pytest.approx(f.sum(), rel=1e-8)
            assert all(abs(r.residual) <= 1e-8 * max(1.0, f.max()) for r in result.residuals)

    def test_modes_agree_within_tenth_percent(self):
        rng = np.random.default_rng(73)
        for _ in range(10):
            net = random_strongly_connected(rng, n_max=12)
            t = uniform_transition(net)
            f = ideal_flow(stationary(t, 500.0), t)
            noisy = f * rng.uniform(0.8, 1.2, size=f.shape)
            unit = unit_ideal_flow(f)
            closed = fit_scale(unit, noisy, mode="closed-form")
            golden = fit_scale(unit, noisy, mode="golden-section")
            assert abs(golden.kappa - closed.kappa) <= 1e-3 * closed.kappa

    def test_trace_minimizer_is_returned_kappa(self):
        unit = unit_ideal_flow(DEMO5_FLOW)
        result = fit_scale(unit, DEMO5_FLOW * 1.3, mode="golden-section")
        best = min(result.search_trace, key=lambda p: p[1])
        assert result.kappa == best[0]
        assert all(result.sse <= s for _, s in result.search_trace)

    def test_mse_is_sse_over_arc_count(self):
        unit = unit_ideal_flow(DEMO5_FLOW)
        result = fit_scale(unit, DEMO5_FLOW * 2.0 + (DEMO5_FLOW > 0))
        assert result.mse == pytest.approx(result.sse / result.arc_count)
        assert result.arc_count == int((DEMO5_FLOW > 0).sum())

    def test_support_union_counts_one_sided_arcs(self):
        unit = unit_ideal_flow(DEMO5_FLOW)
        obs = DEMO5_FLOW.copy() * 42.0
        obs[0, 1] = 0.0  # observed missing on a modeled arc
        result = fit_scale(unit, obs)
        assert result.arc_count == int((DEMO5_FLOW > 0).sum())

    def test_zero_unit_flow_rejected(self):
        with pytest.raises(ZeroUnitFlow):
            fit_scale(np.zeros((3, 3)), np.zeros((3, 3)))

    def test_shape_mismatch_rejected(self):
        with pytest.raises(DimensionMismatch):
            fit_scale(np.zeros((3, 3)), np.zeros((2, 2)))

    def test_arc_mask_excludes_arcs(self):
        unit = unit_ideal_flow(DEMO5_FLOW)
        mask = np.ones_like(DEMO5_FLOW, dtype=bool)
        mask[4, 3] = False
        result = fit_scale(unit, DEMO5_FLOW, arc_mask=mask)
        assert result.arc_count == int((DEMO5_FLOW > 0).sum()) - 1
        assert all((r.tail, r.head) != (4, 3) for r in result.residuals)


class TestExtendObserved:
    def test_strongly_connected_passthrough(self, demo5):
        aug = augment_with_cloud(demo5)
        out = extend_observed_to_augmented(DEMO5_FLOW, aug)
        assert np.array_equal(out, DEMO5_FLOW)

    def test_dummy_arcs_carry_imbalance(self):
        path = DirectedNetwork.from_arcs(3, [(0, 1), (1, 2)])
        aug = augment_with_cloud(path)
        obs = np.zeros((3, 3))
        obs[0, 1] = 10.0
        obs[1, 2] = 10.0
        out = extend_observed_to_augmented(obs, aug)
        cloud = aug.cloud_node
        assert out[2, cloud] == pytest.approx(10.0)  # absorbing node drains
        assert out[cloud, 0] == pytest.approx(10.0)  # source node is fed
        # full pipeline stays solvable
        unit = unit_ideal_flow(out)
        assert unit.sum() == pytest.approx(1.0)

    def test_wrong_shape_rejected(self, demo5):
        aug = augment_with_cloud(demo5)
        with pytest.raises(DimensionMismatch):
            extend_observed_to_augmented(np.zeros((3, 3)), aug)
