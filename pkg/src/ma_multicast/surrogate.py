"""Position-dependent power expansions and their convex surrogates.

Fixing every optimization variable except one antenna position turns each
received power |h_k^H w_n|^2 into a finite sum of cosines of affine functions
of that 2-D position. This module builds those sums, differentiates them in
closed form, bounds their Hessians, and wraps the bounds into quadratic
lower/upper surrogates with exact tangency at the expansion anchor.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .channel import (ScenarioRealization, PositionState, TWO_PI,
                      rx_field_response, tx_field_response, tx_response_matrix)


@dataclass(frozen=True)
class CosineSum:
    """constant + sum_t amplitudes[t] * cos(frequencies[t] . x + phases[t])."""

    constant: float
    amplitudes: np.ndarray   # (T,), all >= 0
    frequencies: np.ndarray  # (T, 2), radians per unit position
    phases: np.ndarray       # (T,)

    def value(self, x: np.ndarray):
        arg = np.asarray(x, dtype=float) @ self.frequencies.T + self.phases
        return self.constant + (self.amplitudes * np.cos(arg)).sum(axis=-1)

    def gradient(self, x: np.ndarray) -> np.ndarray:
        arg = self.frequencies @ np.asarray(x, dtype=float) + self.phases
        return -(self.amplitudes * np.sin(arg)) @ self.frequencies

    def hessian(self, x: np.ndarray) -> np.ndarray:
        arg = self.frequencies @ np.asarray(x, dtype=float) + self.phases
        weights = self.amplitudes * np.cos(arg)
        return -(self.frequencies.T * weights) @ self.frequencies

    def curvature_bound(self) -> float:
        """Scalar psi with psi * I >= +-Hessian(x) for every x.

        H(x) = -sum_t amp_t cos(theta_t(x)) f_t f_t^T, so for any unit v,
        |v^T H v| <= sum_t amp_t (f_t . v)^2 = v^T G v with the PSD Gram
        G = sum_t amp_t f_t f_t^T; the largest eigenvalue of G is therefore
        a global two-sided curvature bound (cosines replaced by 1).
        """
        fx, fy = self.frequencies[:, 0], self.frequencies[:, 1]
        g_xx = float((self.amplitudes * fx * fx).sum())
        g_yy = float((self.amplitudes * fy * fy).sum())
        g_xy = float((self.amplitudes * fx * fy).sum())
        gap = np.hypot(g_xx - g_yy, 2.0 * g_xy)
        return float(0.5 * (g_xx + g_yy + gap))


def _quadratic_expansion(vec: np.ndarray, directions: np.ndarray,
                         wavelength: float) -> tuple[float, list, list, list]:
    """Cosine-sum pieces of |vec^H s(x)|^2 for a steering vector s over directions."""
    amps_abs = np.abs(vec)
    args = np.angle(vec)
    constant = float((amps_abs ** 2).sum())
    amps, freqs, phases = [], [], []
    length = vec.size
    for i in range(length):
        for j in range(i + 1, length):
            amp = 2.0 * amps_abs[i] * amps_abs[j]
            if amp == 0.0:
                continue
            amps.append(amp)
            freqs.append(TWO_PI / wavelength * (directions[j] - directions[i]))
            phases.append(args[i] - args[j])
    return constant, amps, freqs, phases


def _as_cosine_sum(constant, amps, freqs, phases) -> CosineSum:
    if amps:
        return CosineSum(constant, np.asarray(amps, dtype=float),
                         np.asarray(freqs, dtype=float),
                         np.asarray(phases, dtype=float))
    return CosineSum(constant, np.zeros(0), np.zeros((0, 2)), np.zeros(0))


@dataclass(frozen=True)
class TxExpansionContext:
    """Power of user k from group n's beamformer as a function of tx antenna m.

    rx_combined is the receive-side weighting of the transmit paths
    (path_gains^H applied to the receive steering vector); fixed_part collects
    the contribution of all other transmit antennas.
    """

    user: int
    group: int
    antenna: int
    rx_combined: np.ndarray     # (L,)
    w_scalar: complex
    fixed_part: complex
    directions: np.ndarray      # (L, 2) transmit path directions of the user
    wavelength: float
    expansion: CosineSum


@dataclass(frozen=True)
class RxExpansionContext:
    """Power of user k from group n's beamformer as a function of rx position."""

    user: int
    group: int
    tx_combined: np.ndarray     # (L,), path_gains @ G(t) @ w_n
    directions: np.ndarray      # (L, 2) receive path directions of the user
    wavelength: float
    expansion: CosineSum


def build_tx_context(scenario: ScenarioRealization, positions: PositionState,
                     beamformers: np.ndarray, k: int, n: int,
                     m: int) -> TxExpansionContext:
    """Expand |h_k^H w_n|^2 in the position of transmit antenna m."""
    lam = scenario.config.wavelength
    w_n = np.asarray(beamformers)[n]
    dirs = scenario.paths.tx_directions(k)
    f = rx_field_response(positions.rx[k], scenario.paths.rx_directions(k), lam)
    bh = f.conj() @ scenario.path_gains[k]          # row vector b^H, shape (L,)
    b = bh.conj()

    fixed = 0.0 + 0.0j
    for p in range(positions.tx.shape[0]):
        if p == m:
            continue
        fixed += (bh @ tx_field_response(positions.tx[p], dirs, lam)) * w_n[p]

    w_m = complex(w_n[m])
    constant, amps, freqs, phases = _quadratic_expansion(abs(w_m) * b, dirs, lam)
    constant += abs(fixed) ** 2
    # cross terms between antenna m and the fixed remainder
    cross_amp = 2.0 * abs(w_m) * abs(fixed) * np.abs(b)
    cross_phase = np.angle(w_m) - np.angle(fixed) - np.angle(b)
    for i in range(b.size):
        if cross_amp[i] == 0.0:
            continue
        amps.append(float(cross_amp[i]))
        freqs.append(TWO_PI / lam * dirs[i])
        phases.append(float(cross_phase[i]))

    return TxExpansionContext(user=k, group=n, antenna=m, rx_combined=b,
                              w_scalar=w_m, fixed_part=complex(fixed),
                              directions=dirs, wavelength=lam,
                              expansion=_as_cosine_sum(constant, amps, freqs, phases))


def build_rx_context(scenario: ScenarioRealization, positions: PositionState,
                     beamformers: np.ndarray, k: int, n: int) -> RxExpansionContext:
    """Expand |h_k^H w_n|^2 in the position of user k's receive antenna."""
    lam = scenario.config.wavelength
    dirs = scenario.paths.rx_directions(k)
    big_g = tx_response_matrix(positions.tx, scenario.paths.tx_directions(k), lam)
    combined = scenario.path_gains[k] @ (big_g @ np.asarray(beamformers)[n])
    constant, amps, freqs, phases = _quadratic_expansion(combined, dirs, lam)
    return RxExpansionContext(user=k, group=n, tx_combined=combined,
                              directions=dirs, wavelength=lam,
                              expansion=_as_cosine_sum(constant, amps, freqs, phases))


def tx_power_value(ctx: TxExpansionContext, position: np.ndarray):
    return ctx.expansion.value(position)


def tx_power_gradient(ctx: TxExpansionContext, position: np.ndarray) -> np.ndarray:
    return ctx.expansion.gradient(position)


def tx_power_hessian(ctx: TxExpansionContext, position: np.ndarray) -> np.ndarray:
    return ctx.expansion.hessian(position)


def tx_curvature_bound(ctx: TxExpansionContext) -> float:
    return ctx.expansion.curvature_bound()


def rx_power_value(ctx: RxExpansionContext, position: np.ndarray):
    return ctx.expansion.value(position)


def rx_power_gradient(ctx: RxExpansionContext, position: np.ndarray) -> np.ndarray:
    return ctx.expansion.gradient(position)


def rx_power_hessian(ctx: RxExpansionContext, position: np.ndarray) -> np.ndarray:
    return ctx.expansion.hessian(position)


def rx_curvature_bound(ctx: RxExpansionContext) -> float:
    return ctx.expansion.curvature_bound()


@dataclass(frozen=True)
class QuadraticSurrogate:
    """Second-order surrogate value + grad.(x-a) -+ curvature/2 ||x-a||^2.

    direction "lower" bounds the expansion from below, "upper" from above;
    both touch the true function at the anchor with matching gradient.
    """

    anchor: np.ndarray
    value: float
    gradient: np.ndarray
    curvature: float
    direction: Literal["lower", "upper"]

    def evaluate(self, x: np.ndarray):
        x = np.asarray(x, dtype=float)
        delta = x - self.anchor
        linear = self.value + delta @ self.gradient
        quad = 0.5 * self.curvature * (delta * delta).sum(axis=-1)
        return linear - quad if self.direction == "lower" else linear + quad


def _surrogate(expansion: CosineSum, anchor, direction) -> QuadraticSurrogate:
    anchor = np.asarray(anchor, dtype=float)
    return QuadraticSurrogate(anchor=anchor,
                              value=float(expansion.value(anchor)),
                              gradient=expansion.gradient(anchor),
                              curvature=expansion.curvature_bound(),
                              direction=direction)


def lower_surrogate_tx(ctx: TxExpansionContext, anchor) -> QuadraticSurrogate:
    return _surrogate(ctx.expansion, anchor, "lower")


def upper_surrogate_tx(ctx: TxExpansionContext, anchor) -> QuadraticSurrogate:
    return _surrogate(ctx.expansion, anchor, "upper")


def lower_surrogate_rx(ctx: RxExpansionContext, anchor) -> QuadraticSurrogate:
    return _surrogate(ctx.expansion, anchor, "lower")


def upper_surrogate_rx(ctx: RxExpansionContext, anchor) -> QuadraticSurrogate:
    return _surrogate(ctx.expansion, anchor, "upper")


def bilinear_product_upper_bound(eta: float, z: float, eta_anchor: float,
                                 z_anchor: float) -> float:
    """Convex over-estimator of the product eta * z around a positive anchor.

    0.5 * ((z_a/eta_a) eta^2 + (eta_a/z_a) z^2) >= eta z, with equality when
    (eta, z) is proportional to (eta_anchor, z_anchor).
    """
    if eta_anchor <= 0.0 or z_anchor <= 0.0:
        raise ValueError("bilinear bound needs positive anchors")
    return 0.5 * ((z_anchor / eta_anchor) * eta ** 2
                  + (eta_anchor / z_anchor) * z ** 2)


def distance_linearization(t: np.ndarray, anchor: np.ndarray,
                           other: np.ndarray) -> float:
    """Affine global under-estimator of ||t - other||^2, tight at the anchor."""
    t = np.asarray(t, dtype=float)
    anchor = np.asarray(anchor, dtype=float)
    other = np.asarray(other, dtype=float)
    gap = anchor - other
    return float(gap @ gap + 2.0 * gap @ (t - anchor))
