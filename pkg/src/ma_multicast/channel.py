"""Geometry, channel synthesis and SINR evaluation for movable-antenna multicast.

Conventions used across the package:
  * All positions and apertures are expressed in carrier wavelengths; the
    wavelength itself is kept as an explicit parameter (default 1.0) so the
    geometry never depends on an absolute carrier frequency.
  * Power-like config inputs (max transmit power, noise power, reference path
    gain) enter in dBm/dB through `SystemConfig.from_dict` and are stored in
    linear watts internally.
  * The channel of user k is the row vector f_k^H Sigma_k G_k(t); we store its
    conjugate transpose h_k, so the received amplitude of beamformer w is
    h_k^H w.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * np.pi

# A path-response matrix is the complex (L_rx, L_tx) coupling between receive
# and transmit paths of one user (diagonal under the geometric sampler below,
# arbitrary in synthetic tests).
PathResponseMatrix = np.ndarray


def db_to_linear(db: float) -> float:
    """Convert a dB ratio to linear scale."""
    return float(10.0 ** (db / 10.0))


def dbm_to_watt(dbm: float) -> float:
    """Convert a dBm power to watts."""
    return float(10.0 ** (dbm / 10.0) * 1e-3)


def watt_to_dbm(watt: float) -> float:
    return float(10.0 * np.log10(watt / 1e-3))


class ConfigurationError(ValueError):
    """Raised when a SystemConfig cannot describe a feasible setup."""


@dataclass(frozen=True)
class SystemConfig:
    """Static system description. Linear units internally; see from_dict."""

    tx_antennas: int                      # M, movable transmit antennas
    group_sizes: tuple[int, ...]          # users per multicast group, length N
    paths: int                            # L, transmit = receive paths per user
    region_size: float                    # A, side of the square tx region (wavelengths)
    min_spacing: float                    # D, min inter-antenna distance (wavelengths)
    pmax: float                           # total transmit power budget (W)
    noise_power: tuple[float, ...]        # per-user noise power (W), length K
    sinr_weights: tuple[float, ...]       # per-user gamma_k, length K
    reference_gain: float = 1e-4          # path gain at 1 m (linear, -40 dB)
    pathloss_exponent: float = 2.8
    rx_region_size: float | None = None   # per-user rx region side; defaults to region_size
    bs_location: tuple[float, float] = (0.0, 0.0)   # meters
    user_center: tuple[float, float] = (60.0, 0.0)  # meters
    user_radius: float = 20.0                       # meters
    wavelength: float = 1.0

    @property
    def users(self) -> int:
        return int(sum(self.group_sizes))

    @property
    def groups(self) -> int:
        return len(self.group_sizes)

    @property
    def rx_region(self) -> float:
        return self.region_size if self.rx_region_size is None else self.rx_region_size

    def group_of_user(self) -> np.ndarray:
        """Integer array of length K mapping user index to group index."""
        out = np.empty(self.users, dtype=int)
        start = 0
        for n, size in enumerate(self.group_sizes):
            out[start:start + size] = n
            start += size
        return out

    def group_members(self, n: int) -> list[int]:
        start = int(sum(self.group_sizes[:n]))
        return list(range(start, start + self.group_sizes[n]))

    def validate(self) -> None:
        if self.tx_antennas < 1:
            raise ConfigurationError("need at least one transmit antenna")
        if self.paths < 1:
            raise ConfigurationError("need at least one path per user")
        if not self.group_sizes or any(s < 1 for s in self.group_sizes):
            raise ConfigurationError("every group needs at least one user")
        if self.region_size <= 0 or self.rx_region <= 0:
            raise ConfigurationError("region sides must be positive")
        if self.min_spacing <= 0:
            raise ConfigurationError("min antenna spacing must be positive")
        if self.pmax <= 0:
            raise ConfigurationError("power budget must be positive")
        k = self.users
        if len(self.noise_power) != k or any(p <= 0 for p in self.noise_power):
            raise ConfigurationError("noise_power needs K positive entries")
        if len(self.sinr_weights) != k or any(g <= 0 for g in self.sinr_weights):
            raise ConfigurationError("sinr_weights needs K positive entries")
        # feasibility pre-check: the initialization grid must fit the region
        transmit_grid(self.tx_antennas, self.region_size, self.min_spacing,
                      self.wavelength)

    def replace(self, **changes) -> "SystemConfig":
        cfg = dataclasses.replace(self, **changes)
        cfg.validate()
        return cfg

    @classmethod
    def from_dict(cls, raw: dict) -> "SystemConfig":
        """Build a config from an I/O dict (powers in dBm, gains in dB)."""
        k_total = int(sum(raw["group_sizes"]))

        def per_user(value, name):
            if np.isscalar(value):
                return (float(value),) * k_total
            vals = tuple(float(v) for v in value)
            if len(vals) != k_total:
                raise ConfigurationError(f"{name} needs 1 or K entries")
            return vals

        noise_dbm = per_user(raw.get("noise_dbm", -80.0), "noise_dbm")
        cfg = cls(
            tx_antennas=int(raw["tx_antennas"]),
            group_sizes=tuple(int(s) for s in raw["group_sizes"]),
            paths=int(raw["paths"]),
            region_size=float(raw["region_size"]),
            min_spacing=float(raw.get("min_spacing", 0.5)),
            pmax=dbm_to_watt(float(raw["pmax_dbm"])),
            noise_power=tuple(dbm_to_watt(v) for v in noise_dbm),
            sinr_weights=per_user(raw.get("sinr_weights", 1.0), "sinr_weights"),
            reference_gain=db_to_linear(float(raw.get("reference_gain_db", -40.0))),
            pathloss_exponent=float(raw.get("pathloss_exponent", 2.8)),
            rx_region_size=(float(raw["rx_region_size"])
                            if raw.get("rx_region_size") is not None else None),
            bs_location=tuple(raw.get("bs_location", (0.0, 0.0))),
            user_center=tuple(raw.get("user_center", (60.0, 0.0))),
            user_radius=float(raw.get("user_radius", 20.0)),
            wavelength=float(raw.get("wavelength", 1.0)),
        )
        cfg.validate()
        return cfg

    @classmethod
    def from_file(cls, path) -> "SystemConfig":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


def transmit_grid(m: int, region_size: float, min_spacing: float,
                  wavelength: float = 1.0) -> np.ndarray:
    """Centered square grid of m transmit positions with pairwise spacing >= D.

    Spacing prefers max(D, lambda/2); if that grid overflows the region the
    spacing shrinks toward D. Raises ConfigurationError when even spacing D
    cannot fit, which doubles as the config feasibility pre-check.
    """
    side = int(np.ceil(np.sqrt(m)))
    spacing = max(min_spacing, 0.5 * wavelength)
    if side > 1 and (side - 1) * spacing > region_size:
        spacing = region_size / (side - 1)
        if spacing < min_spacing - 1e-12:
            raise ConfigurationError(
                f"{m} antennas at spacing {min_spacing} do not fit in a "
                f"{region_size} x {region_size} region")
        spacing = max(spacing, min_spacing)
    offsets = (np.arange(side) - (side - 1) / 2.0) * spacing
    xx, yy = np.meshgrid(offsets, offsets, indexing="xy")
    points = np.column_stack([xx.ravel(), yy.ravel()])[:m]
    return points - 0.0  # copy


@dataclass
class PathSet:
    """Per-user departure/arrival angles, all arrays of shape (K, L).

    Elevation theta and azimuth phi are i.i.d. uniform on [-pi/2, pi/2] under
    the geometric sampler.
    """

    theta_tx: np.ndarray
    phi_tx: np.ndarray
    theta_rx: np.ndarray
    phi_rx: np.ndarray

    def tx_directions(self, k: int) -> np.ndarray:
        return unit_direction(self.theta_tx[k], self.phi_tx[k])

    def rx_directions(self, k: int) -> np.ndarray:
        return unit_direction(self.theta_rx[k], self.phi_rx[k])


def unit_direction(theta, phi) -> np.ndarray:
    """Projected 2-D direction [cos(theta) sin(phi), sin(theta)], shape (..., 2)."""
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    return np.stack([np.cos(theta) * np.sin(phi), np.sin(theta)], axis=-1)


@dataclass
class ScenarioRealization:
    """One channel draw: geometry angles, path-response matrices, distances."""

    config: SystemConfig
    paths: PathSet
    path_gains: np.ndarray       # complex (K, L, L), user k's path-response matrix
    user_distances: np.ndarray   # (K,) BS-to-user distance in meters

    def __post_init__(self):
        self.group_of_user = self.config.group_of_user()

    def to_dict(self) -> dict:
        cfg = dataclasses.asdict(self.config)
        return {
            "config": cfg,
            "theta_tx": self.paths.theta_tx.tolist(),
            "phi_tx": self.paths.phi_tx.tolist(),
            "theta_rx": self.paths.theta_rx.tolist(),
            "phi_rx": self.paths.phi_rx.tolist(),
            "path_gains": np.stack([self.path_gains.real,
                                    self.path_gains.imag], axis=-1).tolist(),
            "user_distances": self.user_distances.tolist(),
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "ScenarioRealization":
        cfg_raw = dict(raw["config"])
        for key in ("group_sizes", "noise_power", "sinr_weights",
                    "bs_location", "user_center"):
            cfg_raw[key] = tuple(cfg_raw[key])
        config = SystemConfig(**cfg_raw)
        gains = np.asarray(raw["path_gains"], dtype=float)
        return cls(
            config=config,
            paths=PathSet(
                theta_tx=np.asarray(raw["theta_tx"], dtype=float),
                phi_tx=np.asarray(raw["phi_tx"], dtype=float),
                theta_rx=np.asarray(raw["theta_rx"], dtype=float),
                phi_rx=np.asarray(raw["phi_rx"], dtype=float),
            ),
            path_gains=gains[..., 0] + 1j * gains[..., 1],
            user_distances=np.asarray(raw["user_distances"], dtype=float),
        )

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh)

    @classmethod
    def load(cls, path) -> "ScenarioRealization":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


@dataclass
class PositionState:
    """Current antenna placement: tx (M, 2), rx (K, 2), wavelengths."""

    tx: np.ndarray
    rx: np.ndarray

    def copy(self) -> "PositionState":
        return PositionState(self.tx.copy(), self.rx.copy())

    def min_tx_spacing(self) -> float:
        m = self.tx.shape[0]
        if m < 2:
            return np.inf
        diff = self.tx[:, None, :] - self.tx[None, :, :]
        dist = np.sqrt((diff ** 2).sum(-1))
        return float(dist[np.triu_indices(m, k=1)].min())

    def region_overrun(self, config: SystemConfig) -> float:
        """Largest distance by which any coordinate leaves its box (0 if inside)."""
        tx_over = np.abs(self.tx).max() - config.region_size / 2.0
        rx_over = np.abs(self.rx).max() - config.rx_region / 2.0
        return float(max(tx_over, rx_over, 0.0))


def tx_field_response(position: np.ndarray, directions: np.ndarray,
                      wavelength: float = 1.0) -> np.ndarray:
    """Transmit steering vector exp(j 2pi/lambda t.a_i), shape (L,)."""
    phase = TWO_PI / wavelength * directions @ np.asarray(position, dtype=float)
    return np.exp(1j * phase)


def rx_field_response(position: np.ndarray, directions: np.ndarray,
                      wavelength: float = 1.0) -> np.ndarray:
    """Receive steering vector, mirror of tx_field_response."""
    return tx_field_response(position, directions, wavelength)


def tx_response_matrix(tx_positions: np.ndarray, directions: np.ndarray,
                       wavelength: float = 1.0) -> np.ndarray:
    """Stack of transmit steering vectors, shape (L, M)."""
    phase = TWO_PI / wavelength * directions @ np.asarray(tx_positions, dtype=float).T
    return np.exp(1j * phase)


def channel_vector(scenario: ScenarioRealization, positions: PositionState,
                   k: int) -> np.ndarray:
    """Channel h_k (M,) such that the received amplitude is h_k^H w."""
    lam = scenario.config.wavelength
    f = rx_field_response(positions.rx[k], scenario.paths.rx_directions(k), lam)
    big_g = tx_response_matrix(positions.tx, scenario.paths.tx_directions(k), lam)
    row = f.conj() @ scenario.path_gains[k] @ big_g   # f^H Sigma G, shape (M,)
    return row.conj()


def channel_matrix(scenario: ScenarioRealization,
                   positions: PositionState) -> np.ndarray:
    """All user channels stacked into shape (K, M)."""
    return np.stack([channel_vector(scenario, positions, k)
                     for k in range(scenario.config.users)])


def sample_scenario(config: SystemConfig,
                    rng: np.random.Generator) -> ScenarioRealization:
    """Draw one random realization of the geometric channel model.

    Users fall uniformly on a disk around config.user_center; each of the L
    transmit/receive path pairs gets i.i.d. angles and a complex normal
    response with per-user variance reference_gain * d^-alpha split evenly
    across paths (diagonal path-response matrix).
    """
    k_total, paths = config.users, config.paths
    radius = config.user_radius * np.sqrt(rng.uniform(size=k_total))
    azimuth = rng.uniform(0.0, TWO_PI, size=k_total)
    users_xy = np.asarray(config.user_center) + np.column_stack(
        [radius * np.cos(azimuth), radius * np.sin(azimuth)])
    distances = np.linalg.norm(users_xy - np.asarray(config.bs_location), axis=1)

    angle = lambda: rng.uniform(-np.pi / 2, np.pi / 2, size=(k_total, paths))
    path_set = PathSet(theta_tx=angle(), phi_tx=angle(),
                       theta_rx=angle(), phi_rx=angle())

    gains = np.zeros((k_total, paths, paths), dtype=complex)
    for k in range(k_total):
        var = config.reference_gain * distances[k] ** (-config.pathloss_exponent)
        scale = np.sqrt(var / (2.0 * paths))
        diag = scale * (rng.standard_normal(paths) + 1j * rng.standard_normal(paths))
        np.fill_diagonal(gains[k], diag)
    return ScenarioRealization(config=config, paths=path_set,
                               path_gains=gains, user_distances=distances)


def realization_rng(master_seed: int, *key: int) -> np.random.Generator:
    """Independent substream for (sweep point, realization, ...) indices."""
    return np.random.default_rng(np.random.SeedSequence((int(master_seed),) + tuple(int(v) for v in key)))


def compute_min_weighted_sinr(scenario: ScenarioRealization,
                              positions: PositionState,
                              beamformers: np.ndarray) -> tuple[np.ndarray, float]:
    """Per-user SINR and the max-min objective min_k SINR_k / gamma_k.

    Args:
        beamformers: complex (N, M), one beamformer per group. With a single
            group the denominator is the noise power alone.

    Returns:
        (sinr, objective) where sinr has shape (K,).
    """
    cfg = scenario.config
    h = channel_matrix(scenario, positions)          # (K, M)
    amps = h.conj() @ np.asarray(beamformers).T      # (K, N), entry [k, n] = h_k^H w_n
    powers = np.abs(amps) ** 2
    group = scenario.group_of_user
    sig = powers[np.arange(cfg.users), group]
    interference = powers.sum(axis=1) - sig
    sinr = sig / (interference + np.asarray(cfg.noise_power))
    objective = float((sinr / np.asarray(cfg.sinr_weights)).min())
    return sinr, objective
