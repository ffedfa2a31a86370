"""Sanity checks for the independent validation oracles themselves."""

import numpy as np
import pytest

from ma_multicast.oracles import (finite_diff_gradient, finite_diff_hessian,
                                  grid_search_position, mrt_value,
                                  scalar_beamformer_value)


def wavy(x):
    return np.sin(3.0 * x[0] + 1.0) * np.cos(2.0 * x[1]) + 0.5 * x[0] * x[1]


def wavy_gradient(x):
    return np.array([
        3.0 * np.cos(3.0 * x[0] + 1.0) * np.cos(2.0 * x[1]) + 0.5 * x[1],
        -2.0 * np.sin(3.0 * x[0] + 1.0) * np.sin(2.0 * x[1]) + 0.5 * x[0]])


def wavy_hessian(x):
    s, c = np.sin(3.0 * x[0] + 1.0), np.cos(3.0 * x[0] + 1.0)
    return np.array([
        [-9.0 * s * np.cos(2.0 * x[1]), -6.0 * c * np.sin(2.0 * x[1]) + 0.5],
        [-6.0 * c * np.sin(2.0 * x[1]) + 0.5, -4.0 * s * np.cos(2.0 * x[1])]])


def test_finite_diff_gradient_analytic(rng):
    for _ in range(20):
        x = rng.uniform(-2, 2, size=2)
        fd = finite_diff_gradient(wavy, x)
        assert np.linalg.norm(fd - wavy_gradient(x)) <= 1e-7 * max(
            1.0, np.linalg.norm(wavy_gradient(x)))


def test_finite_diff_hessian_analytic(rng):
    for _ in range(20):
        x = rng.uniform(-2, 2, size=2)
        fd = finite_diff_hessian(wavy, x)
        assert np.abs(fd - wavy_hessian(x)).max() <= 1e-5


def test_grid_search_finds_bowl_peak():
    target = np.array([0.42, -0.17])
    point, value = grid_search_position(
        lambda p: -np.sum((p - target) ** 2), 2.0, 0.01)
    assert np.abs(point - target).max() <= 0.01
    assert value <= 0.0


def test_grid_search_vectorized_matches_scalar():
    f_scalar = lambda p: np.cos(4 * p[0]) + np.sin(3 * p[1])
    f_batch = lambda pts: np.cos(4 * pts[:, 0]) + np.sin(3 * pts[:, 1])
    p1, v1 = grid_search_position(f_scalar, 1.0, 0.05)
    p2, v2 = grid_search_position(f_batch, 1.0, 0.05, vectorized=True)
    assert np.array_equal(p1, p2) and v1 == v2


def test_grid_search_tie_breaks_lexicographically():
    point, _ = grid_search_position(lambda p: 1.0, 1.0, 0.25)
    assert np.allclose(point, [-0.5, -0.5])


def test_grid_search_cell_cap():
    with pytest.raises(ValueError):
        grid_search_position(lambda p: 0.0, 10.0, 1e-5)


def test_mrt_value():
    h = np.array([1.0 + 1j, 2.0])
    assert mrt_value(h, 2.0, 0.5) == pytest.approx(2.0 * 6.0 / 0.5)


def test_scalar_beamformer_value():
    h = np.array([2.0, 1j])
    value = scalar_beamformer_value(h, (1.0, 2.0), 4.0, (1.0, 0.25))
    # weighted SNR floors: 4/1 = 4 for user 0, 1/(2*0.25) = 2 for user 1
    assert value == pytest.approx(4.0 * 2.0)
