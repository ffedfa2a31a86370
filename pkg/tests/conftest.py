"""Shared builders for synthetic test scenarios (O(1) gains, full matrices)."""

import numpy as np
import pytest

from ma_multicast.channel import (PathSet, PositionState, ScenarioRealization,
                                  SystemConfig)


def toy_config(m=2, group_sizes=(2,), paths=2, region=3.0, spacing=0.5,
               pmax=1.0, noise=1.0, weights=1.0, rx_region=None) -> SystemConfig:
    """Config in plain linear units for math-level tests."""
    k = int(sum(group_sizes))
    noise = (noise,) * k if np.isscalar(noise) else tuple(noise)
    weights = (weights,) * k if np.isscalar(weights) else tuple(weights)
    cfg = SystemConfig(tx_antennas=m, group_sizes=tuple(group_sizes),
                       paths=paths, region_size=region, min_spacing=spacing,
                       pmax=pmax, noise_power=noise, sinr_weights=weights,
                       rx_region_size=rx_region)
    cfg.validate()
    return cfg


def toy_scenario(rng, config=None, gain=1.0, diagonal=False, **cfg_kw) -> ScenarioRealization:
    """Random scenario with O(1) path gains and a full (or diagonal) matrix."""
    cfg = config or toy_config(**cfg_kw)
    k, paths = cfg.users, cfg.paths
    angle = lambda: rng.uniform(-np.pi / 2, np.pi / 2, size=(k, paths))
    path_set = PathSet(theta_tx=angle(), phi_tx=angle(),
                       theta_rx=angle(), phi_rx=angle())
    shape = (k, paths, paths)
    gains = gain / np.sqrt(2) * (rng.standard_normal(shape)
                                 + 1j * rng.standard_normal(shape))
    if diagonal:
        gains = np.einsum("kij,ij->kij", gains, np.eye(paths))
    return ScenarioRealization(config=cfg, paths=path_set, path_gains=gains,
                               user_distances=np.full(k, 60.0))


def random_positions(rng, cfg) -> PositionState:
    """Feasible random placement (tx respects the pairwise spacing)."""
    half_t, half_r = cfg.region_size / 2.0, cfg.rx_region / 2.0
    for _ in range(10_000):
        tx = rng.uniform(-half_t, half_t, size=(cfg.tx_antennas, 2))
        if cfg.tx_antennas < 2:
            break
        diff = tx[:, None, :] - tx[None, :, :]
        dist = np.sqrt((diff ** 2).sum(-1))
        if dist[np.triu_indices(cfg.tx_antennas, k=1)].min() >= cfg.min_spacing:
            break
    else:
        raise RuntimeError("could not sample feasible tx positions")
    rx = rng.uniform(-half_r, half_r, size=(cfg.users, 2))
    return PositionState(tx=tx, rx=rx)


def random_beamformers(rng, cfg, power=None) -> np.ndarray:
    """Random beamformers scaled to use the full power budget."""
    w = rng.standard_normal((cfg.groups, cfg.tx_antennas)) \
        + 1j * rng.standard_normal((cfg.groups, cfg.tx_antennas))
    total = np.sum(np.abs(w) ** 2)
    return w * np.sqrt((power or cfg.pmax) / total)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
