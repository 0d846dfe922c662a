"""Scenario construction: geometry, steering, pathloss, channels, covariances.

Angle convention: both ULAs lie along the y-axis with broadside pointing in
+x, angles are measured in degrees from broadside (positive toward +y).
Target and clutter angles are given relative to the IRS directly.  All powers
are handled in linear watts internally; dBm appears only at the config layer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .tensorlin import PsdFactor, kron


def dbm_to_watts(x_dbm: float) -> float:
    return 10.0 ** ((x_dbm - 30.0) / 10.0)


def db_to_linear(x_db: float) -> float:
    return 10.0 ** (x_db / 10.0)


@dataclass(frozen=True)
class SystemConfig:
    """Array sizes, powers (watts), noise (watts), and per-user rate thresholds."""

    n_bs_antennas: int = 8
    n_irs_elements: int = 32
    n_users: int = 3
    snapshot_length: int = 64
    power_budget: float = dbm_to_watts(40.0)
    radar_noise: float = dbm_to_watts(-80.0)
    user_noise: tuple[float, ...] = ()
    rate_thresholds: tuple[float, ...] = ()
    rician_factor: float = 0.5
    alpha_bs_irs: float = 2.5
    alpha_irs_user: float = 2.5
    alpha_bs_user: float = 3.5

    def __post_init__(self):
        if not self.user_noise:
            object.__setattr__(
                self, "user_noise", (dbm_to_watts(-80.0),) * self.n_users
            )
        if not self.rate_thresholds:
            object.__setattr__(self, "rate_thresholds", (3.0,) * self.n_users)
        if not (self.n_users <= self.n_bs_antennas <= self.snapshot_length):
            raise ValueError(
                f"require K <= N <= L, got K={self.n_users}, "
                f"N={self.n_bs_antennas}, L={self.snapshot_length}"
            )
        if self.power_budget <= 0 or self.radar_noise <= 0:
            raise ValueError("powers must be positive")
        if any(p <= 0 for p in self.user_noise):
            raise ValueError("user noise powers must be positive")
        if any(r < 0 for r in self.rate_thresholds):
            raise ValueError("rate thresholds must be nonnegative")
        if len(self.user_noise) != self.n_users:
            raise ValueError("user_noise length must equal n_users")
        if len(self.rate_thresholds) != self.n_users:
            raise ValueError("rate_thresholds length must equal n_users")
        if self.rician_factor < 0:
            raise ValueError("rician_factor must be >= 0")


@dataclass(frozen=True)
class Geometry:
    """Node placement in meters (2-D Cartesian)."""

    bs_position: tuple[float, float] = (0.0, 0.0)
    irs_position: tuple[float, float] = (50.0, 10.0)
    user_center: tuple[float, float] = (60.0, 0.0)
    user_radius: float = 2.5

    def __post_init__(self):
        if self.bs_position == self.irs_position:
            raise ValueError("BS and IRS positions must be distinct")
        if self.user_radius < 0:
            raise ValueError("user radius must be >= 0")


@dataclass(frozen=True)
class ResponseCovariance:
    """Low-rank representation of a target/clutter response covariance."""

    factor: PsdFactor

    @property
    def rank(self) -> int:
        return self.factor.rank

    @property
    def matrix(self) -> np.ndarray:
        return self.factor.matrix


@dataclass(frozen=True)
class RadarEnvironment:
    """Scatterer angles (degrees, relative to the IRS) and linear strengths."""

    target_angles: tuple[float, ...]
    target_strengths: tuple[float, ...]
    clutter_angles: tuple[float, ...] = ()
    clutter_strengths: tuple[float, ...] = ()
    n_irs_elements: int = 32
    r_target: ResponseCovariance = field(init=False)
    r_clutter: ResponseCovariance = field(init=False)

    def __post_init__(self):
        if len(self.target_angles) != len(self.target_strengths):
            raise ValueError("target angle/strength lists must match")
        if len(self.clutter_angles) != len(self.clutter_strengths):
            raise ValueError("clutter angle/strength lists must match")
        if any(s < 0 for s in self.target_strengths + self.clutter_strengths):
            raise ValueError("scatterer strengths must be >= 0")
        object.__setattr__(
            self,
            "r_target",
            build_response_covariance(
                self.target_angles, self.target_strengths, self.n_irs_elements
            ),
        )
        object.__setattr__(
            self,
            "r_clutter",
            build_response_covariance(
                self.clutter_angles, self.clutter_strengths, self.n_irs_elements
            ),
        )

    def with_elements(self, m: int) -> "RadarEnvironment":
        return replace(self, n_irs_elements=m)

    def with_clutter_count(self, n_c: int) -> "RadarEnvironment":
        return replace(
            self,
            clutter_angles=self.clutter_angles[:n_c],
            clutter_strengths=self.clutter_strengths[:n_c],
        )


@dataclass(frozen=True)
class ChannelSet:
    """All complex channels plus the geometry-derived angles and pathlosses."""

    h_bi: np.ndarray  # M x N
    h_iu: np.ndarray  # K x M
    h_bu: np.ndarray  # K x N
    theta_b: float  # AOD at the BS toward the IRS, degrees
    theta_i: float  # AOA at the IRS from the BS, degrees
    xi: float  # BS-IRS pathloss amplitude
    los_mode: bool


@dataclass(frozen=True)
class Scenario:
    """Immutable bundle consumed by the optimization pipelines."""

    config: SystemConfig
    geometry: Geometry
    environment: RadarEnvironment
    channels: ChannelSet
    seed: int
    los_mode: bool
    blocked_bs_user: bool = False


def steering(theta_deg: float, n: int) -> np.ndarray:
    """Half-wavelength ULA steering vector: entry i = exp(-j pi i sin(theta))."""
    if n < 1:
        raise ValueError("steering requires n >= 1")
    phase = -1j * np.pi * np.arange(n) * math.sin(math.radians(theta_deg))
    return np.exp(phase)


def pathloss_gain(d: float, alpha: float) -> float:
    """Linear amplitude gain for the -30 - 10*alpha*log10(d) dB power law."""
    if d <= 0:
        raise ValueError("link length must be positive")
    power_db = -30.0 - 10.0 * alpha * math.log10(d)
    return math.sqrt(db_to_linear(power_db))


def _bearing_deg(src: tuple[float, float], dst: tuple[float, float]) -> float:
    """Angle from array broadside (+x) of dst as seen from src, in degrees."""
    dx = dst[0] - src[0]
    dy = dst[1] - src[1]
    d = math.hypot(dx, dy)
    if d == 0:
        raise ValueError("coincident positions")
    return math.degrees(math.asin(max(-1.0, min(1.0, dy / d))))


def los_channel(
    geometry: Geometry, config: SystemConfig
) -> tuple[np.ndarray, float, float]:
    """Rank-1 LoS BS-IRS channel H_BI = xi * b(theta_I) a^H(theta_B)."""
    d = math.dist(geometry.bs_position, geometry.irs_position)
    theta_b = _bearing_deg(geometry.bs_position, geometry.irs_position)
    theta_i = _bearing_deg(geometry.irs_position, geometry.bs_position)
    xi = pathloss_gain(d, config.alpha_bs_irs)
    b_i = steering(theta_i, config.n_irs_elements)
    a_b = steering(theta_b, config.n_bs_antennas)
    return xi * np.outer(b_i, a_b.conj()), theta_b, theta_i


def rician_channel(
    mean_component: np.ndarray,
    kappa: float,
    pathloss: float,
    rng: np.random.Generator,
) -> np.ndarray:
    """Rician fading around a deterministic mean, scaled by a pathloss amplitude."""
    if kappa < 0:
        raise ValueError("rician factor must be >= 0")
    mean_component = np.asarray(mean_component, dtype=complex)
    shape = mean_component.shape
    g = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2.0)
    if math.isinf(kappa):
        return pathloss * mean_component
    return pathloss * (
        math.sqrt(kappa / (1.0 + kappa)) * mean_component
        + math.sqrt(1.0 / (1.0 + kappa)) * g
    )


def build_response_covariance(
    angles_deg: tuple[float, ...] | list[float],
    strengths: tuple[float, ...] | list[float],
    m: int,
) -> ResponseCovariance:
    """Covariance sum_p beta_p^2 u_p u_p^H with u_p = b*(theta_p) kron b(theta_p).

    Returned via its tall factor with columns beta_p u_p; an empty angle list
    gives the zero covariance (rank 0).
    """
    if len(angles_deg) != len(strengths):
        raise ValueError("angles and strengths must have equal length")
    cols = []
    for theta, beta_sq in zip(angles_deg, strengths):
        b = steering(theta, m)
        cols.append(math.sqrt(beta_sq) * kron(b.conj(), b))
    factor = (
        np.stack(cols, axis=1) if cols else np.zeros((m * m, 0), dtype=complex)
    )
    return ResponseCovariance(factor=PsdFactor(factor=factor))


def _draw_user_positions(
    geometry: Geometry, k: int, rng: np.random.Generator
) -> list[tuple[float, float]]:
    cx, cy = geometry.user_center
    radii = geometry.user_radius * np.sqrt(rng.random(k))
    angles = 2.0 * np.pi * rng.random(k)
    return [
        (cx + r * math.cos(a), cy + r * math.sin(a)) for r, a in zip(radii, angles)
    ]


def make_scenario(
    config: SystemConfig,
    geometry: Geometry,
    environment: RadarEnvironment,
    seed: int,
    los_mode: bool = True,
    blocked_bs_user: bool = False,
) -> Scenario:
    """Draw a full reproducible scenario: user placement plus all channels."""
    if environment.n_irs_elements != config.n_irs_elements:
        environment = environment.with_elements(config.n_irs_elements)
    rng = np.random.default_rng(seed)
    n, m, k = config.n_bs_antennas, config.n_irs_elements, config.n_users
    kappa = config.rician_factor

    h_bi_los, theta_b, theta_i = los_channel(geometry, config)
    xi = pathloss_gain(
        math.dist(geometry.bs_position, geometry.irs_position), config.alpha_bs_irs
    )
    if los_mode:
        h_bi = h_bi_los
    else:
        h_bi = rician_channel(h_bi_los / xi, kappa, xi, rng)

    users = _draw_user_positions(geometry, k, rng)
    h_bu = np.zeros((k, n), dtype=complex)
    h_iu = np.zeros((k, m), dtype=complex)
    for idx, pos in enumerate(users):
        d_bu = math.dist(geometry.bs_position, pos)
        d_iu = math.dist(geometry.irs_position, pos)
        mean_bu = steering(_bearing_deg(geometry.bs_position, pos), n)
        mean_iu = steering(_bearing_deg(geometry.irs_position, pos), m)
        h_bu[idx] = rician_channel(
            mean_bu, kappa, pathloss_gain(d_bu, config.alpha_bs_user), rng
        )
        h_iu[idx] = rician_channel(
            mean_iu, kappa, pathloss_gain(d_iu, config.alpha_irs_user), rng
        )
    if blocked_bs_user:
        h_bu = np.zeros_like(h_bu)

    channels = ChannelSet(
        h_bi=h_bi,
        h_iu=h_iu,
        h_bu=h_bu,
        theta_b=theta_b,
        theta_i=theta_i,
        xi=xi,
        los_mode=los_mode,
    )
    return Scenario(
        config=config,
        geometry=geometry,
        environment=environment,
        channels=channels,
        seed=seed,
        los_mode=los_mode,
        blocked_bs_user=blocked_bs_user,
    )
