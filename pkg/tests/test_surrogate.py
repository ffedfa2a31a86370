"""Tests for the cosine expansions, curvature bounds, and surrogate functions."""

import numpy as np
import pytest

from conftest import toy_scenario, random_positions, random_beamformers
from ma_multicast.channel import channel_vector
from ma_multicast.oracles import finite_diff_gradient, finite_diff_hessian
from ma_multicast.surrogate import (
    CosineSum,
    bilinear_product_upper_bound,
    build_rx_context,
    build_tx_context,
    distance_linearization,
    lower_surrogate_rx,
    lower_surrogate_tx,
    rx_curvature_bound,
    rx_power_gradient,
    rx_power_hessian,
    rx_power_value,
    tx_curvature_bound,
    tx_power_gradient,
    tx_power_hessian,
    tx_power_value,
    upper_surrogate_rx,
    upper_surrogate_tx,
)


def _random_tx_instance(rng, m=None, groups=None, paths=None):
    m = m if m is not None else int(rng.integers(1, 5))
    groups = groups if groups is not None else int(rng.integers(1, 4))
    paths = paths if paths is not None else int(rng.integers(1, 7))
    scenario = toy_scenario(rng, m=m, group_sizes=tuple([1] * groups), paths=paths)
    positions = random_positions(rng, scenario.config)
    beamformers = random_beamformers(rng, scenario.config)
    k = int(rng.integers(scenario.config.users))
    n = int(rng.integers(scenario.config.groups))
    antenna = int(rng.integers(m))
    return scenario, positions, beamformers, k, n, antenna


def _true_tx_power(scenario, positions, beamformers, k, n, antenna, point):
    moved = positions.copy()
    moved.tx[antenna] = point
    h = channel_vector(scenario, moved, k)
    return abs(np.vdot(h, beamformers[n])) ** 2


def _true_rx_power(scenario, positions, beamformers, k, n, point):
    moved = positions.copy()
    moved.rx[k] = point
    h = channel_vector(scenario, moved, k)
    return abs(np.vdot(h, beamformers[n])) ** 2


class TestTxExpansion:
    def test_matches_direct_channel_product(self, rng):
        for _ in range(40):
            scenario, positions, w, k, n, m = _random_tx_instance(rng)
            ctx = build_tx_context(scenario, positions, w, k, n, m)
            for _ in range(5):
                point = rng.uniform(-2.0, 2.0, size=2)
                truth = _true_tx_power(scenario, positions, w, k, n, m, point)
                got = tx_power_value(ctx, point)
                assert got == pytest.approx(truth, rel=1e-9, abs=1e-15)

    def test_value_at_current_position(self, rng):
        scenario, positions, w, k, n, m = _random_tx_instance(rng)
        ctx = build_tx_context(scenario, positions, w, k, n, m)
        truth = _true_tx_power(scenario, positions, w, k, n, m, positions.tx[m])
        assert tx_power_value(ctx, positions.tx[m]) == pytest.approx(truth, rel=1e-9)

    def test_single_antenna_has_no_fixed_residual(self, rng):
        scenario, positions, w, k, n, m = _random_tx_instance(rng, m=1)
        ctx = build_tx_context(scenario, positions, w, k, n, m)
        assert ctx.fixed_part == 0

    def test_receive_outer_product_is_hermitian(self, rng):
        scenario, positions, w, k, n, m = _random_tx_instance(rng)
        ctx = build_tx_context(scenario, positions, w, k, n, m)
        outer = np.outer(ctx.rx_combined, ctx.rx_combined.conj())
        assert np.max(np.abs(outer - outer.conj().T)) <= 1e-12

    def test_single_path_single_antenna_is_constant(self, rng):
        scenario, positions, w, k, n, m = _random_tx_instance(rng, m=1, paths=1)
        ctx = build_tx_context(scenario, positions, w, k, n, m)
        a = tx_power_value(ctx, rng.uniform(-2, 2, size=2))
        b = tx_power_value(ctx, rng.uniform(-2, 2, size=2))
        assert a == pytest.approx(b, rel=1e-12)
        assert np.allclose(tx_power_gradient(ctx, rng.uniform(-2, 2, size=2)), 0.0)
        assert tx_curvature_bound(ctx) == pytest.approx(0.0, abs=1e-15)


class TestRxExpansion:
    def test_matches_direct_channel_product(self, rng):
        for _ in range(40):
            scenario, positions, w, k, n, _ = _random_tx_instance(rng)
            ctx = build_rx_context(scenario, positions, w, k, n)
            for _ in range(5):
                point = rng.uniform(-2.0, 2.0, size=2)
                truth = _true_rx_power(scenario, positions, w, k, n, point)
                got = rx_power_value(ctx, point)
                assert got == pytest.approx(truth, rel=1e-9, abs=1e-15)

    def test_single_path_is_constant(self, rng):
        scenario, positions, w, k, n, _ = _random_tx_instance(rng, paths=1)
        ctx = build_rx_context(scenario, positions, w, k, n)
        a = rx_power_value(ctx, rng.uniform(-2, 2, size=2))
        b = rx_power_value(ctx, rng.uniform(-2, 2, size=2))
        assert a == pytest.approx(b, rel=1e-12)
        assert np.allclose(rx_power_gradient(ctx, rng.uniform(-2, 2, size=2)), 0.0)
        assert rx_curvature_bound(ctx) == pytest.approx(0.0, abs=1e-15)


class TestDerivatives:
    def test_tx_gradient_matches_finite_differences(self, rng):
        checked = 0
        while checked < 100:
            scenario, positions, w, k, n, m = _random_tx_instance(rng)
            ctx = build_tx_context(scenario, positions, w, k, n, m)
            point = rng.uniform(-2.0, 2.0, size=2)
            grad = tx_power_gradient(ctx, point)
            fd = finite_diff_gradient(lambda x: tx_power_value(ctx, x), point)
            scale = max(np.linalg.norm(fd), 1e-6 * (1.0 + abs(ctx.expansion.constant)))
            assert np.linalg.norm(grad - fd) <= 1e-5 * scale
            checked += 1

    def test_tx_hessian_matches_finite_differences(self, rng):
        for _ in range(30):
            scenario, positions, w, k, n, m = _random_tx_instance(rng)
            ctx = build_tx_context(scenario, positions, w, k, n, m)
            point = rng.uniform(-2.0, 2.0, size=2)
            hess = tx_power_hessian(ctx, point)
            fd = finite_diff_hessian(lambda x: tx_power_value(ctx, x), point)
            scale = max(np.linalg.norm(fd), 1e-3)
            assert np.linalg.norm(hess - fd) <= 1e-3 * scale

    def test_rx_gradient_matches_finite_differences(self, rng):
        for _ in range(50):
            scenario, positions, w, k, n, _ = _random_tx_instance(rng)
            ctx = build_rx_context(scenario, positions, w, k, n)
            point = rng.uniform(-2.0, 2.0, size=2)
            grad = rx_power_gradient(ctx, point)
            fd = finite_diff_gradient(lambda x: rx_power_value(ctx, x), point)
            scale = max(np.linalg.norm(fd), 1e-6 * (1.0 + abs(ctx.expansion.constant)))
            assert np.linalg.norm(grad - fd) <= 1e-5 * scale

    def test_rx_hessian_matches_finite_differences(self, rng):
        for _ in range(30):
            scenario, positions, w, k, n, _ = _random_tx_instance(rng)
            ctx = build_rx_context(scenario, positions, w, k, n)
            point = rng.uniform(-2.0, 2.0, size=2)
            hess = rx_power_hessian(ctx, point)
            fd = finite_diff_hessian(lambda x: rx_power_value(ctx, x), point)
            scale = max(np.linalg.norm(fd), 1e-3)
            assert np.linalg.norm(hess - fd) <= 1e-3 * scale

    def test_hessian_is_symmetric(self, rng):
        scenario, positions, w, k, n, m = _random_tx_instance(rng)
        ctx = build_tx_context(scenario, positions, w, k, n, m)
        hess = tx_power_hessian(ctx, rng.uniform(-2, 2, size=2))
        assert hess[0, 1] == hess[1, 0]

    def test_gradient_invariant_under_global_phase(self, rng):
        scenario, positions, w, k, n, m = _random_tx_instance(rng)
        rotated = w * np.exp(1j * 0.7)
        point = rng.uniform(-2.0, 2.0, size=2)
        g1 = tx_power_gradient(build_tx_context(scenario, positions, w, k, n, m), point)
        g2 = tx_power_gradient(build_tx_context(scenario, positions, rotated, k, n, m), point)
        assert np.allclose(g1, g2, rtol=1e-10, atol=1e-12)


class TestCurvatureBound:
    def test_dominates_sampled_hessian_norms_tx(self, rng):
        scenario, positions, w, k, n, m = _random_tx_instance(rng)
        ctx = build_tx_context(scenario, positions, w, k, n, m)
        psi = tx_curvature_bound(ctx)
        for _ in range(100):
            point = rng.uniform(-2.0, 2.0, size=2)
            spectral = np.linalg.norm(tx_power_hessian(ctx, point), ord=2)
            assert psi >= spectral - 1e-9 * max(1.0, psi)

    def test_dominates_sampled_hessian_norms_rx(self, rng):
        scenario, positions, w, k, n, _ = _random_tx_instance(rng)
        ctx = build_rx_context(scenario, positions, w, k, n)
        psi = rx_curvature_bound(ctx)
        for _ in range(100):
            point = rng.uniform(-2.0, 2.0, size=2)
            spectral = np.linalg.norm(rx_power_hessian(ctx, point), ord=2)
            assert psi >= spectral - 1e-9 * max(1.0, psi)

    def test_scales_quadratically_with_beamformer(self, rng):
        scenario, positions, w, k, n, m = _random_tx_instance(rng)
        psi = tx_curvature_bound(build_tx_context(scenario, positions, w, k, n, m))
        psi_scaled = tx_curvature_bound(
            build_tx_context(scenario, positions, 3.0 * w, k, n, m)
        )
        assert psi_scaled == pytest.approx(9.0 * psi, rel=1e-10)


class TestQuadraticSurrogates:
    def test_tangency_at_anchor(self, rng):
        for _ in range(10):
            scenario, positions, w, k, n, m = _random_tx_instance(rng)
            ctx = build_tx_context(scenario, positions, w, k, n, m)
            anchor = rng.uniform(-1.5, 1.5, size=2)
            truth = tx_power_value(ctx, anchor)
            lo = lower_surrogate_tx(ctx, anchor)
            hi = upper_surrogate_tx(ctx, anchor)
            scale = max(1.0, abs(truth))
            assert abs(lo.evaluate(anchor) - truth) <= 1e-12 * scale
            assert abs(hi.evaluate(anchor) - truth) <= 1e-12 * scale

    def test_global_bounds_tx(self, rng):
        scenario, positions, w, k, n, m = _random_tx_instance(rng)
        ctx = build_tx_context(scenario, positions, w, k, n, m)
        half = scenario.config.region_size / 2.0
        anchor = rng.uniform(-half, half, size=2)
        lo = lower_surrogate_tx(ctx, anchor)
        hi = upper_surrogate_tx(ctx, anchor)
        points = rng.uniform(-half, half, size=(1000, 2))
        truth = tx_power_value(ctx, points)
        slack = 1e-9 * np.maximum(1.0, np.abs(truth))
        assert np.all(lo.evaluate(points) <= truth + slack)
        assert np.all(hi.evaluate(points) >= truth - slack)

    def test_global_bounds_rx(self, rng):
        scenario, positions, w, k, n, _ = _random_tx_instance(rng)
        ctx = build_rx_context(scenario, positions, w, k, n)
        half = scenario.config.region_size / 2.0
        anchor = rng.uniform(-half, half, size=2)
        lo = lower_surrogate_rx(ctx, anchor)
        hi = upper_surrogate_rx(ctx, anchor)
        points = rng.uniform(-half, half, size=(1000, 2))
        truth = rx_power_value(ctx, points)
        slack = 1e-9 * np.maximum(1.0, np.abs(truth))
        assert np.all(lo.evaluate(points) <= truth + slack)
        assert np.all(hi.evaluate(points) >= truth - slack)

    def test_constant_expansion_surrogate_is_exact(self, rng):
        scenario, positions, w, k, n, m = _random_tx_instance(rng, m=1, paths=1)
        ctx = build_tx_context(scenario, positions, w, k, n, m)
        anchor = rng.uniform(-1.0, 1.0, size=2)
        lo = lower_surrogate_tx(ctx, anchor)
        point = rng.uniform(-1.0, 1.0, size=2)
        assert lo.evaluate(point) == pytest.approx(tx_power_value(ctx, point), rel=1e-12)


class TestBilinearBound:
    def test_exact_at_anchor(self):
        assert bilinear_product_upper_bound(2.0, 5.0, 2.0, 5.0) == pytest.approx(
            10.0, rel=1e-14
        )

    def test_mean_of_squares_at_equal_anchors(self):
        # anchors (1, 1) reduce the bound to (eta^2 + z^2) / 2
        assert bilinear_product_upper_bound(3.0, 4.0, 1.0, 1.0) == pytest.approx(12.5)

    def test_dominates_product_on_random_tuples(self, rng):
        for _ in range(1000):
            eta, z, ea, za = rng.uniform(0.01, 10.0, size=4)
            bound = bilinear_product_upper_bound(eta, z, ea, za)
            assert bound >= eta * z - 1e-12 * max(1.0, eta * z)

    def test_rejects_nonpositive_anchors(self):
        with pytest.raises(ValueError):
            bilinear_product_upper_bound(1.0, 1.0, 0.0, 1.0)
        with pytest.raises(ValueError):
            bilinear_product_upper_bound(1.0, 1.0, 1.0, -2.0)


class TestDistanceLinearization:
    def test_tangent_at_anchor(self, rng):
        anchor = rng.uniform(-1, 1, size=2)
        other = rng.uniform(-1, 1, size=2)
        truth = float(np.sum((anchor - other) ** 2))
        assert distance_linearization(anchor, anchor, other) == pytest.approx(
            truth, rel=1e-12
        )

    def test_never_exceeds_true_squared_distance(self, rng):
        for _ in range(500):
            t = rng.uniform(-2, 2, size=2)
            anchor = rng.uniform(-2, 2, size=2)
            other = rng.uniform(-2, 2, size=2)
            truth = float(np.sum((t - other) ** 2))
            bound = distance_linearization(t, anchor, other)
            assert bound <= truth + 1e-12 * max(1.0, truth)

    def test_degenerate_anchor_gives_zero(self, rng):
        other = rng.uniform(-1, 1, size=2)
        t = rng.uniform(-1, 1, size=2)
        assert distance_linearization(t, other, other) == pytest.approx(0.0, abs=1e-15)


class TestCosineSumContainer:
    def test_empty_sum_is_constant(self):
        cs = CosineSum(
            constant=2.5,
            amplitudes=np.zeros(0),
            frequencies=np.zeros((0, 2)),
            phases=np.zeros(0),
        )
        assert cs.value(np.array([0.3, -0.7])) == 2.5
        assert np.allclose(cs.gradient(np.array([0.3, -0.7])), 0.0)
        assert cs.curvature_bound() == 0.0

    def test_single_term_known_values(self):
        # 2 cos(pi * x + 0) at x = 0: value 2, d/dx = 0, d2/dx2 = -2 pi^2
        cs = CosineSum(
            constant=0.0,
            amplitudes=np.array([2.0]),
            frequencies=np.array([[np.pi, 0.0]]),
            phases=np.array([0.0]),
        )
        point = np.zeros(2)
        assert cs.value(point) == pytest.approx(2.0)
        assert np.allclose(cs.gradient(point), 0.0, atol=1e-15)
        hess = cs.hessian(point)
        assert hess[0, 0] == pytest.approx(-2.0 * np.pi**2)
        assert hess[1, 1] == pytest.approx(0.0, abs=1e-15)
        assert cs.curvature_bound() == pytest.approx(2.0 * np.pi**2)
