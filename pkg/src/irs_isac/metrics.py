"""Objective and constraint evaluation for beamforming states.

Sensing mutual information is reported in nats (natural logs keep the
determinant algebra clean); communication rates are in bits/s/Hz.  The
reflection vector convention is fixed here once: the physical reflection
matrix is E = diag(conj(e)) for the optimizer's phase vector e.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .scene import ChannelSet, RadarEnvironment, Scenario, SystemConfig, steering
from .tensorlin import kron, logdet_hpd

BEAMPATTERN_FLOOR_DB = -100.0


@dataclass(frozen=True)
class BeamformingState:
    """BS beamformer split [W_C, W_R] plus IRS phase vector e."""

    w_c: np.ndarray  # N x K
    w_r: np.ndarray  # N x N
    e: np.ndarray  # length M, (near) unit modulus

    @property
    def w(self) -> np.ndarray:
        return np.hstack([self.w_c, self.w_r])

    @property
    def power(self) -> float:
        return float(np.linalg.norm(self.w) ** 2)

    def with_e(self, e: np.ndarray) -> "BeamformingState":
        return BeamformingState(w_c=self.w_c, w_r=self.w_r, e=np.asarray(e))

    def with_w(self, w_c: np.ndarray, w_r: np.ndarray) -> "BeamformingState":
        return BeamformingState(w_c=w_c, w_r=w_r, e=self.e)


@dataclass(frozen=True)
class MIReport:
    """One-stop evaluation record for a candidate state."""

    mi_nats: float
    rates: tuple[float, ...]
    power_used: float
    modulus_residual: float


def reflection_matrix(e: np.ndarray) -> np.ndarray:
    """Physical IRS reflection matrix for phase vector e."""
    return np.diag(np.conj(np.asarray(e)))


def effective_channels(channels: ChannelSet, e: np.ndarray) -> np.ndarray:
    """Rows h_k^H of the combined direct-plus-reflected downlink channel."""
    refl = np.conj(channels.h_iu) * np.conj(e)[None, :]
    return np.conj(channels.h_bu) + refl @ channels.h_bi


def _response_factors(channels: ChannelSet, state: BeamformingState):
    """Kronecker factors X1, X2 of A = (H_BI^T E^T) kron (H_BI^H E^H)."""
    e_phys = np.conj(np.asarray(state.e))  # diagonal of E
    x1 = channels.h_bi.T * e_phys[None, :]
    x2 = channels.h_bi.conj().T * np.conj(e_phys)[None, :]
    return x1, x2


def _logdet_term(
    x1: np.ndarray, left: np.ndarray, factor: np.ndarray, eta: float
) -> float:
    """log det(I_r + eta F^H A^H (I kron left^H left) A F) via the tall factor.

    `left` right-multiplies the second Kronecker factor; passing W^H gives the
    large-snapshot objective, passing (S^H W^H) gives a finite-block draw.
    """
    if factor.shape[1] == 0:
        return 0.0
    g = kron(x1, left) @ factor
    r = factor.shape[1]
    inner = np.eye(r) + eta * g.conj().T @ g
    return logdet_hpd(inner)


def sensing_mi(
    state: BeamformingState,
    channels: ChannelSet,
    environment: RadarEnvironment,
    config: SystemConfig,
) -> float:
    """Sensing MI in nats for the large-snapshot signal model.

    Difference of two log dets with target-plus-clutter and clutter-only
    response covariances; both are evaluated at factor rank, never at the
    full M^2 x M^2 size.
    """
    eta = config.snapshot_length / config.radar_noise
    x1, x2 = _response_factors(channels, state)
    wh_x2 = state.w.conj().T @ x2
    f_r = environment.r_target.factor.factor
    f_c = environment.r_clutter.factor.factor
    f_rc = np.hstack([f_r, f_c])
    value = _logdet_term(x1, wh_x2, f_rc, eta) - _logdet_term(x1, wh_x2, f_c, eta)
    if not np.isfinite(value):
        raise FloatingPointError("sensing MI evaluation produced a non-finite value")
    return float(value)


def simplified_mi_scalar(
    state: BeamformingState,
    channels: ChannelSet,
    environment: RadarEnvironment,
    config: SystemConfig,
    rank_tol: float = 1e-8,
) -> float:
    """Rank-1-channel reduction of the MI argument, excluding the pathloss.

    For a LoS BS-IRS link and no clutter the MI collapses to
    log(1 + (L xi^4 / sigma_R^2) * s); this returns the scalar s,
    sum_p beta_p^2 |b_p^H E b_I|^2 * N * a^H W W^H a with pure (unit
    amplitude) steering vectors.
    """
    if environment.r_clutter.rank != 0:
        raise ValueError("simplified objective requires an empty clutter set")
    svals = np.linalg.svd(channels.h_bi, compute_uv=False)
    if svals.size > 1 and svals[1] > rank_tol * svals[0]:
        raise ValueError("simplified objective requires a rank-1 BS-IRS channel")
    m = channels.h_bi.shape[0]
    n = channels.h_bi.shape[1]
    b_i = steering(channels.theta_i, m)
    a_b = steering(channels.theta_b, n)
    x = np.conj(state.e) * b_i  # E b(theta_I)
    f_r = environment.r_target.factor.factor
    cascade = kron(x, np.conj(x)) @ f_r  # entries beta_p |b_p^H E b_I|^2
    bs_gain = float(np.linalg.norm(state.w.conj().T @ a_b) ** 2)
    return float(np.linalg.norm(cascade) ** 2) * n * bs_gain


def simplified_mi_to_nats(scalar: float, xi: float, config: SystemConfig) -> float:
    """Map the simplified scalar objective back to MI in nats."""
    eta = config.snapshot_length / config.radar_noise
    return float(np.log1p(eta * xi**4 * scalar))


def comm_rate(
    k: int, state: BeamformingState, channels: ChannelSet, config: SystemConfig
) -> float:
    """Achievable rate of user k in bits/s/Hz under treat-interference-as-noise."""
    if not 0 <= k < config.n_users:
        raise IndexError(f"user index {k} out of range")
    h_rows = effective_channels(channels, state.e)
    gains_c = h_rows[k] @ state.w_c  # length K
    gain_r = h_rows[k] @ state.w_r
    signal = abs(gains_c[k]) ** 2
    interference = (
        float(np.sum(np.abs(gains_c) ** 2) - signal)
        + float(np.linalg.norm(gain_r) ** 2)
        + config.user_noise[k]
    )
    return float(np.log2(1.0 + signal / interference))


def all_rates(
    state: BeamformingState, channels: ChannelSet, config: SystemConfig
) -> tuple[float, ...]:
    return tuple(comm_rate(k, state, channels, config) for k in range(config.n_users))


def beampattern(
    state: BeamformingState, channels: ChannelSet, grid_deg: np.ndarray | list[float]
) -> np.ndarray:
    """Reflected transmit pattern at the IRS aperture, in dB, peak at 0 dB."""
    grid = np.atleast_1d(np.asarray(grid_deg, dtype=float))
    if grid.size == 0:
        raise ValueError("beampattern grid must be non-empty")
    m = channels.h_bi.shape[0]
    cascade = reflection_matrix(state.e) @ channels.h_bi @ state.w  # M x K~
    power = np.empty(grid.size)
    for i, theta in enumerate(grid):
        b = steering(theta, m)
        power[i] = np.linalg.norm(b.conj() @ cascade) ** 2
    peak = float(power.max())
    if peak <= 0.0:
        return np.full(grid.size, BEAMPATTERN_FLOOR_DB)
    db = 10.0 * np.log10(np.maximum(power / peak, 10.0 ** (BEAMPATTERN_FLOOR_DB / 10)))
    return db


def sensing_mi_monte_carlo(
    state: BeamformingState,
    channels: ChannelSet,
    environment: RadarEnvironment,
    config: SystemConfig,
    n_draws: int,
    seed: int,
) -> float:
    """Finite-block MI estimate, used to validate the large-L approximation.

    Each draw builds a Gaussian communication block and a radar block
    projected onto its orthogonal complement, then evaluates the exact
    conditional log-det difference for that realization.
    """
    if n_draws < 1:
        raise ValueError("n_draws must be >= 1")
    rng = np.random.default_rng(seed)
    n, k, length = config.n_bs_antennas, config.n_users, config.snapshot_length
    inv_noise = 1.0 / config.radar_noise
    x1, x2 = _response_factors(channels, state)
    f_r = environment.r_target.factor.factor
    f_c = environment.r_clutter.factor.factor
    f_rc = np.hstack([f_r, f_c])

    def cgauss(rows: int) -> np.ndarray:
        return (
            rng.standard_normal((rows, length))
            + 1j * rng.standard_normal((rows, length))
        ) / np.sqrt(2.0)

    total = 0.0
    for _ in range(n_draws):
        s_c = cgauss(k)
        s_r = cgauss(n)
        # project radar rows orthogonal to the communication rows
        gram = s_c @ s_c.conj().T
        s_r = s_r - (s_r @ s_c.conj().T) @ np.linalg.solve(gram, s_c)
        x_block = state.w @ np.vstack([s_c, s_r])  # N x L transmit signal
        left = x_block.conj().T @ x2  # stands in for S^H W^H X2
        total += _logdet_term(x1, left, f_rc, inv_noise)
        total -= _logdet_term(x1, left, f_c, inv_noise)
    return total / n_draws


def modulus_residual(e: np.ndarray) -> float:
    """Largest deviation of |e_m| from 1."""
    return float(np.max(np.abs(np.abs(np.asarray(e)) - 1.0)))


def evaluate(state: BeamformingState, scenario: Scenario) -> MIReport:
    """Bundle MI, rates, power, and modulus residual for reporting."""
    return MIReport(
        mi_nats=sensing_mi(
            state, scenario.channels, scenario.environment, scenario.config
        ),
        rates=all_rates(state, scenario.channels, scenario.config),
        power_used=state.power,
        modulus_residual=modulus_residual(state.e),
    )


def is_feasible(
    state: BeamformingState,
    scenario: Scenario,
    rate_slack: float = 1e-4,
    power_slack: float = 1e-6,
    modulus_slack: float = 1e-3,
) -> bool:
    report = evaluate(state, scenario)
    rates_ok = all(
        r >= thr - rate_slack
        for r, thr in zip(report.rates, scenario.config.rate_thresholds)
    )
    return (
        rates_ok
        and report.power_used <= scenario.config.power_budget + power_slack
        and report.modulus_residual <= modulus_slack
    )
