"""Steering vectors, beamspace channels, and random scenario generation.

Angles are radians internally; configuration values are degrees and dB as in
the usual link-budget conventions (dBm and dB are both taken relative to the
same unit power, since only ratios enter the SINRs).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class ConfigurationError(ValueError):
    """Invalid scenario or sweep configuration."""


def db_to_linear(x_db: float) -> float:
    return float(10.0 ** (x_db / 10.0))


@dataclass(frozen=True)
class ArrayGeometry:
    """Uniform linear array: element count and spacing in wavelengths."""

    elements: int
    spacing: float = 0.5

    def __post_init__(self) -> None:
        if self.elements < 1:
            raise ConfigurationError(f"need at least one element, got {self.elements}")
        if self.spacing <= 0:
            raise ConfigurationError(f"spacing must be positive, got {self.spacing}")


@dataclass(frozen=True)
class PathSet:
    """Resolvable propagation paths: complex gains, arrival and departure angles."""

    gains: np.ndarray
    aoas: np.ndarray
    aods: np.ndarray

    def __post_init__(self) -> None:
        if not (len(self.gains) == len(self.aoas) == len(self.aods)):
            raise ConfigurationError("gains, aoas and aods must have equal length")
        for angles in (self.aoas, self.aods):
            if np.any(np.abs(angles) >= np.pi / 2):
                raise ConfigurationError("path angles must lie in (-pi/2, pi/2)")

    def __len__(self) -> int:
        return len(self.gains)


def steering(geometry: ArrayGeometry, theta: float) -> np.ndarray:
    """ULA steering vector: entry n is exp(-j 2 pi (d/lambda) n sin(theta)).

    The domain check admits the closed interval [-pi/2, pi/2]; endfire angles
    are well defined even though sampled paths never produce them.
    """
    if abs(theta) > np.pi / 2:
        raise ValueError(f"angle {theta} outside [-pi/2, pi/2]")
    n = np.arange(geometry.elements)
    return np.exp(-2j * np.pi * geometry.spacing * n * np.sin(theta))


def beamspace_channel(
    paths: PathSet, rx: ArrayGeometry, tx: ArrayGeometry
) -> np.ndarray:
    """Sum of rank-1 outer products: sum_l b_l a_rx(theta_l) a_tx(psi_l)^H."""
    a_rx = np.column_stack([steering(rx, t) for t in paths.aoas])
    a_tx = np.column_stack([steering(tx, p) for p in paths.aods])
    return (a_rx * paths.gains) @ a_tx.conj().T


def jammer_manifold(aoas, rx: ArrayGeometry) -> np.ndarray:
    """Matrix whose columns are the receive steering vectors of the given AoAs."""
    aoas = np.atleast_1d(np.asarray(aoas, dtype=float))
    if aoas.size == 0:
        raise ValueError("need at least one arrival angle")
    return np.column_stack([steering(rx, t) for t in aoas])


@dataclass(frozen=True)
class ScenarioConfig:
    """Scenario dimensions and powers; defaults reproduce the reference setup."""

    users: int = 3
    user_antennas: int = 8
    bs_antennas: int = 16
    jammer_antennas: int = 16
    user_paths: int = 3
    jammer_paths: int = 3
    user_power_dbm: float = 5.0
    noise_power_db: float = -10.0
    jammer_power_dbm: float = 20.0
    jammer_aoa_deg: float = -20.0
    user_aoa_deg: tuple[float, ...] = (-10.0, 0.0, 10.0)
    angle_spread_deg: float = 5.0
    spacing: float = 0.5

    def __post_init__(self) -> None:
        if self.bs_antennas < self.users + 1:
            raise ConfigurationError(
                f"bs_antennas must be >= users + 1 "
                f"({self.bs_antennas} < {self.users + 1})"
            )
        if len(self.user_aoa_deg) != self.users:
            raise ConfigurationError(
                f"need {self.users} user AoA centers, got {len(self.user_aoa_deg)}"
            )
        for name in ("users", "user_antennas", "jammer_antennas", "user_paths",
                     "jammer_paths"):
            if getattr(self, name) < 1:
                raise ConfigurationError(f"{name} must be positive")


@dataclass(frozen=True)
class Scenario:
    """Full ground-truth world state for one Monte-Carlo trial."""

    channels: tuple[np.ndarray, ...]
    precoders: tuple[np.ndarray, ...]
    jammer_channel: np.ndarray
    bs_jammer_manifold: np.ndarray
    jammer_gains: np.ndarray
    jammer_tx_manifold: np.ndarray
    user_paths: tuple[PathSet, ...]
    jammer_paths: PathSet
    user_powers: tuple[float, ...]
    jammer_power: float
    sigma2: float
    spacing: float
    seed: int | None = None

    def __post_init__(self) -> None:
        if self.bs_antennas < self.num_users + 1:
            raise ConfigurationError("scenario violates N_B >= K + 1")
        for w, p in zip(self.precoders, self.user_powers):
            if np.linalg.norm(w) ** 2 > p + 1e-9:
                raise ConfigurationError("precoder exceeds its power budget")

    @property
    def num_users(self) -> int:
        return len(self.channels)

    @property
    def bs_antennas(self) -> int:
        return self.channels[0].shape[0]

    @property
    def jammer_antennas(self) -> int:
        return self.jammer_channel.shape[1]

    @property
    def jammer_aoas(self) -> np.ndarray:
        return self.jammer_paths.aoas


@dataclass(frozen=True)
class ReceiverKnowledge:
    """What the base station actually knows: uplink channels and precoders,
    the jammer arrival angles, and its own noise floor and array geometry.

    Deliberately excludes the jammer gains, departure angles, antenna count,
    and power budget."""

    channels: tuple[np.ndarray, ...]
    precoders: tuple[np.ndarray, ...]
    jammer_aoas: np.ndarray
    sigma2: float
    spacing: float

    @property
    def num_users(self) -> int:
        return len(self.channels)

    @property
    def bs_antennas(self) -> int:
        return self.channels[0].shape[0]

    @property
    def bs_geometry(self) -> ArrayGeometry:
        return ArrayGeometry(self.bs_antennas, self.spacing)


def receiver_knowledge(sc: Scenario) -> ReceiverKnowledge:
    return ReceiverKnowledge(
        channels=sc.channels,
        precoders=sc.precoders,
        jammer_aoas=sc.jammer_aoas.copy(),
        sigma2=sc.sigma2,
        spacing=sc.spacing,
    )


def _complex_gains(rng: np.random.Generator, count: int) -> np.ndarray:
    # circular complex Gaussian, zero mean, unit total variance per gain
    re = rng.standard_normal(count)
    im = rng.standard_normal(count)
    return (re + 1j * im) / np.sqrt(2.0)


def _sample_paths(
    rng: np.random.Generator, count: int, center_deg: float, spread_deg: float
) -> PathSet:
    gains = _complex_gains(rng, count)
    aoa = np.deg2rad(center_deg + rng.uniform(-spread_deg, spread_deg, count))
    aod = np.deg2rad(rng.uniform(-spread_deg, spread_deg, count))
    return PathSet(gains=gains, aoas=aoa, aods=aod)


def sample_scenario(cfg: ScenarioConfig, seed: int | None = None) -> Scenario:
    """Draw one scenario: beamspace channels with Gaussian path gains,
    AoA/AoD offsets uniform on +-angle_spread_deg around the configured
    centers, and full-power SVD precoders.  Identical seeds reproduce the
    scenario bit-exactly."""
    from .txrx import svd_precoder  # deferred: txrx depends on this module

    rng = np.random.default_rng(seed)
    bs = ArrayGeometry(cfg.bs_antennas, cfg.spacing)
    user_geom = ArrayGeometry(cfg.user_antennas, cfg.spacing)
    jam_geom = ArrayGeometry(cfg.jammer_antennas, cfg.spacing)
    p_user = db_to_linear(cfg.user_power_dbm)

    user_paths = []
    channels = []
    precoders = []
    for center in cfg.user_aoa_deg:
        paths = _sample_paths(rng, cfg.user_paths, center, cfg.angle_spread_deg)
        h = beamspace_channel(paths, bs, user_geom)
        user_paths.append(paths)
        channels.append(h)
        precoders.append(svd_precoder(h, p_user))

    jammer_paths = _sample_paths(
        rng, cfg.jammer_paths, cfg.jammer_aoa_deg, cfg.angle_spread_deg
    )
    a_b = jammer_manifold(jammer_paths.aoas, bs)
    a_j = jammer_manifold(jammer_paths.aods, jam_geom)
    # effective per-path gains carry a 1/sqrt(N_J) aperture normalization so
    # the jammer's deliverable power is set by its power budget, not by its
    # antenna count; this is what makes sweeps over N_J comparable
    jammer_gains = jammer_paths.gains / np.sqrt(cfg.jammer_antennas)
    g = (a_b * jammer_gains) @ a_j.conj().T

    return Scenario(
        channels=tuple(channels),
        precoders=tuple(precoders),
        jammer_channel=g,
        bs_jammer_manifold=a_b,
        jammer_gains=jammer_gains,
        jammer_tx_manifold=a_j,
        user_paths=tuple(user_paths),
        jammer_paths=jammer_paths,
        user_powers=(p_user,) * cfg.users,
        jammer_power=db_to_linear(cfg.jammer_power_dbm),
        sigma2=db_to_linear(cfg.noise_power_db),
        spacing=cfg.spacing,
        seed=seed,
    )
