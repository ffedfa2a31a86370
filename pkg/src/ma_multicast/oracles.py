"""Independent reference implementations used to validate the optimizer.

Everything in this module is deliberately written from scratch against the
problem definitions (finite differences, brute-force search, closed forms)
and shares no helpers with the surrogate or block-update code it checks.
"""

from __future__ import annotations

import numpy as np


def finite_diff_gradient(f, x: np.ndarray, step: float = 1e-6) -> np.ndarray:
    """Central-difference gradient of a scalar function on R^2 (or R^n)."""
    x = np.asarray(x, dtype=float)
    grad = np.zeros_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = step
        grad[i] = (f(x + e) - f(x - e)) / (2.0 * step)
    return grad


def finite_diff_hessian(f, x: np.ndarray, step: float = 1e-4) -> np.ndarray:
    """Central-difference Hessian; off-diagonals via the four-point stencil."""
    x = np.asarray(x, dtype=float)
    n = x.size
    hess = np.zeros((n, n))
    f0 = f(x)
    for i in range(n):
        ei = np.zeros(n)
        ei[i] = step
        hess[i, i] = (f(x + ei) - 2.0 * f0 + f(x - ei)) / step ** 2
        for j in range(i + 1, n):
            ej = np.zeros(n)
            ej[j] = step
            hess[i, j] = (f(x + ei + ej) - f(x + ei - ej)
                          - f(x - ei + ej) + f(x - ei - ej)) / (4.0 * step ** 2)
            hess[j, i] = hess[i, j]
    return hess


def grid_search_position(f, region_size: float, resolution: float,
                         vectorized: bool = False,
                         cell_cap: int = 20_000_000) -> tuple[np.ndarray, float]:
    """Brute-force maximizer of f over the centered square of side region_size.

    The lattice is anchored at the lower-left corner with step `resolution`
    (the far edge is included only when the side is an integer multiple of the
    step). Ties break to the lexicographically smallest (x, y) point.

    Args:
        f: scalar function of a length-2 point; if vectorized=True it must
            accept an (P, 2) array and return (P,) values.
        cell_cap: guard against accidentally huge grids.

    Returns:
        (argmax point (2,), max value).
    """
    if resolution <= 0:
        raise ValueError("resolution must be positive")
    half = region_size / 2.0
    axis = -half + resolution * np.arange(int(np.floor(region_size / resolution + 1e-9)) + 1)
    if axis.size ** 2 > cell_cap:
        raise ValueError(f"grid of {axis.size}^2 cells exceeds cap {cell_cap}")
    # row-major over (x, y) so np.argmax's first-hit rule is the lexicographic tie-break
    xx, yy = np.meshgrid(axis, axis, indexing="ij")
    points = np.column_stack([xx.ravel(), yy.ravel()])
    if vectorized:
        values = np.asarray(f(points), dtype=float)
    else:
        values = np.array([f(p) for p in points], dtype=float)
    best = int(np.argmax(values))
    return points[best].copy(), float(values[best])


def mrt_value(h: np.ndarray, pmax: float, noise_power: float) -> float:
    """Single-user matched-filter optimum: Pmax ||h||^2 / sigma^2."""
    h = np.asarray(h)
    return float(pmax * np.vdot(h, h).real / noise_power)


def scalar_beamformer_value(channels, weights, pmax: float, noise_power) -> float:
    """Single-antenna multicast optimum Pmax min_k |h_k|^2 / (gamma_k sigma_k^2).

    With one transmit antenna only the power of the scalar weight matters, so
    the best strategy is full power and the weighted SNRs follow directly.
    """
    h = np.asarray(channels).reshape(-1)
    gamma = np.broadcast_to(np.asarray(weights, dtype=float), h.shape)
    sigma2 = np.broadcast_to(np.asarray(noise_power, dtype=float), h.shape)
    return float(pmax * (np.abs(h) ** 2 / (gamma * sigma2)).min())
