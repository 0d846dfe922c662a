"""Alternating optimization for the LoS, clutter-free setting.

The BS step is a semidefinite relaxation whose optimum admits an exact rank-1
recovery, so it is solved globally given the phases.  The IRS step majorizes
the quartic phase objective by a convex quadratic and handles the unit-modulus
set with a penalized convex-concave procedure over slack variables.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import cvxpy as cp
import numpy as np

from .conic import ConeProgram, ConicError, SolveStatus, psd_constraint
from .metrics import BeamformingState, all_rates, effective_channels, sensing_mi
from .scene import ChannelSet, RadarEnvironment, Scenario, SystemConfig, steering
from .tensorlin import psd_factor, psd_shift
from .trace import IterationRecord, RunTrace

DEGENERATE_USER_TOL = 1e-12


class InfeasibleRatesError(RuntimeError):
    """The rate thresholds cannot be met for the given channels and budget."""


class DegenerateUserError(RuntimeError):
    """A relaxed beamforming block carries no power toward its user."""


class SimplifiedCaseError(ValueError):
    """Scenario violates the LoS / clutter-free preconditions of this pipeline."""


class CcpInfeasibleError(RuntimeError):
    """The convexified phase subproblem is infeasible; caller should restart."""


@dataclass(frozen=True)
class Alg1Options:
    eps_outer: float = 1e-7
    eps_inner: float = 1e-5
    eps_modulus: float = 1e-3
    tau_max: int = 100
    max_outer: int = 30
    rho0: float = 1e-3
    mu: float = 3.0
    rho_max: float = 1e4
    restart_budget: int = 5
    solver_tol: float = 1e-8
    seed: int = 0

    def __post_init__(self):
        if min(self.eps_outer, self.eps_inner, self.eps_modulus) <= 0:
            raise ValueError("tolerances must be positive")
        if self.mu <= 1:
            raise ValueError("penalty growth ratio must exceed 1")


@dataclass(frozen=True)
class CcpState:
    e_current: np.ndarray
    slack: np.ndarray
    rho: float
    tau: int
    objective: float | None = None

    @property
    def slack_l1(self) -> float:
        return float(np.sum(np.abs(self.slack)))


def random_phases(rng: np.random.Generator, m: int) -> np.ndarray:
    return np.exp(1j * rng.uniform(0.0, 2.0 * np.pi, m))


def project_phases(e: np.ndarray) -> np.ndarray:
    """Snap near-unit entries to exact unit modulus, preserving phase."""
    e = np.asarray(e)
    mags = np.abs(e)
    if np.any(mags < 1e-12):
        raise ValueError("cannot project a zero entry onto the unit circle")
    return e / mags


def _scaled_rows(channels: ChannelSet, config: SystemConfig, e: np.ndarray):
    """Effective channel rows h_k^H normalized by the per-user noise amplitude."""
    rows = effective_channels(channels, e)
    scale = 1.0 / np.sqrt(np.asarray(config.user_noise))
    return rows * scale[:, None]


def _sinr_targets(config: SystemConfig) -> np.ndarray:
    return 2.0 ** np.asarray(config.rate_thresholds) - 1.0


def bs_sdp(
    e: np.ndarray,
    channels: ChannelSet,
    config: SystemConfig,
    comm_only: bool = False,
    tol: float = 1e-8,
) -> tuple[np.ndarray, list[np.ndarray]]:
    """Relaxed BS beamforming step at fixed phases.

    Maximizes the array gain toward the IRS subject to per-user SINR linear
    matrix constraints and the power budget; rank constraints are dropped.
    With `comm_only` the total covariance is pinned to the sum of the per-user
    blocks (no dedicated sensing power).
    """
    n, k = config.n_bs_antennas, config.n_users
    rows = _scaled_rows(channels, config, e)
    omegas = _sinr_targets(config)
    a = steering(channels.theta_b, n)

    prog = ConeProgram()
    c_x = prog.hermitian_psd_var(n)
    w_vars = [prog.hermitian_psd_var(n) for _ in range(k)]
    for idx in range(k):
        h = rows[idx].conj()  # column vector h_k (scaled)
        quad_w = cp.real(h.conj() @ w_vars[idx].expr @ h)
        quad_c = cp.real(h.conj() @ c_x.expr @ h)
        prog.add(
            (1.0 + omegas[idx]) * quad_w >= omegas[idx] * quad_c + omegas[idx]
        )
    prog.add(cp.real(cp.trace(c_x.expr)) <= config.power_budget)
    w_sum = sum(w.expr for w in w_vars)
    if comm_only:
        prog.add(c_x.expr == w_sum)
    else:
        prog.add(psd_constraint(c_x.expr - w_sum))
    prog.maximize(cp.real(a.conj() @ c_x.expr @ a))

    solution = prog.solve(tol)
    if solution.status is SolveStatus.INFEASIBLE:
        raise InfeasibleRatesError(
            "rate thresholds are unattainable at the given phases"
        )
    if not solution.ok:
        raise ConicError(solution.status, "BS beamforming step failed")
    return c_x.value, [w.value for w in w_vars]


def rank1_recover(
    c_x: np.ndarray,
    w_blocks: list[np.ndarray],
    e: np.ndarray,
    channels: ChannelSet,
    config: SystemConfig,
) -> BeamformingState:
    """Exact rank-1 extraction from the relaxed BS solution.

    Preserves the objective and every constraint of the relaxation; the
    sensing block is any PSD square root of the leftover covariance.
    """
    n, k = config.n_bs_antennas, config.n_users
    rows = _scaled_rows(channels, config, e)
    w_c = np.zeros((n, k), dtype=complex)
    for idx in range(k):
        h = rows[idx].conj()
        val = float(np.real(h.conj() @ w_blocks[idx] @ h))
        if val <= DEGENERATE_USER_TOL:
            raise DegenerateUserError(f"no usable power toward user {idx}")
        w_c[:, idx] = (w_blocks[idx] @ h) / np.sqrt(val)
    leftover = c_x - w_c @ w_c.conj().T
    leftover = 0.5 * (leftover + leftover.conj().T)
    # the relaxation guarantees PSD up to solver error; clamp tiny negatives
    vals, vecs = np.linalg.eigh(leftover)
    vals = np.maximum(vals, 0.0)
    factor = vecs * np.sqrt(vals)
    w_r = np.zeros((n, n), dtype=complex)
    w_r[:, : factor.shape[1]] = factor
    return BeamformingState(w_c=w_c, w_r=w_r, e=np.asarray(e))


def comm_only_sdp(
    e: np.ndarray, channels: ChannelSet, config: SystemConfig, tol: float = 1e-8
) -> BeamformingState:
    """Communication-only BS step: all power in per-user beams."""
    c_x, w_blocks = bs_sdp(e, channels, config, comm_only=True, tol=tol)
    state = rank1_recover(c_x, w_blocks, e, channels, config)
    return state.with_w(state.w_c, np.zeros_like(state.w_r))


def _target_projections(
    environment: RadarEnvironment, theta_i: float, m: int
) -> tuple[np.ndarray, np.ndarray]:
    """Per-target vectors m_p = b*(theta_p) o b(theta_I) and strengths."""
    b_i = steering(theta_i, m)
    vecs = np.stack(
        [np.conj(steering(t, m)) * b_i for t in environment.target_angles], axis=1
    )
    return vecs, np.asarray(environment.target_strengths)


def irs_quartic(
    e: np.ndarray, environment: RadarEnvironment, theta_i: float
) -> float:
    """The phase-dependent factor of the simplified objective (to maximize)."""
    m_vecs, strengths = _target_projections(environment, theta_i, len(e))
    proj = m_vecs.conj().T @ np.asarray(e)
    return float(np.sum(strengths * np.abs(proj) ** 4))


def g1_matrix(
    e_prev: np.ndarray, environment: RadarEnvironment, theta_i: float
) -> np.ndarray:
    """Quadratic majorizer curvature of the negated quartic at e_prev.

    minimize e^H G1 e + const is the surrogate of minimizing -quartic(e) over
    the norm-sqrt(M) sphere; tangency and domination are exercised in tests.
    """
    e_prev = np.asarray(e_prev)
    m = len(e_prev)
    m_vecs, strengths = _target_projections(environment, theta_i, m)
    norms4 = np.linalg.norm(m_vecs, axis=0) ** 4
    tr_mr = float(np.sum(strengths * norms4))
    proj = m_vecs.conj().T @ e_prev
    weights = strengths * np.abs(proj) ** 2
    g1 = -2.0 * tr_mr * np.outer(e_prev, e_prev.conj())
    g1 -= 2.0 * (m_vecs * weights[None, :]) @ m_vecs.conj().T
    return 0.5 * (g1 + g1.conj().T)


def surrogate_value(
    e: np.ndarray,
    e_prev: np.ndarray,
    environment: RadarEnvironment,
    theta_i: float,
) -> float:
    """Majorizer of -quartic at e_prev, valid for ||e||^2 = M."""
    m = len(e_prev)
    m_vecs, strengths = _target_projections(environment, theta_i, m)
    tr_mr = float(np.sum(strengths * np.linalg.norm(m_vecs, axis=0) ** 4))
    g1 = g1_matrix(e_prev, environment, theta_i)
    const = irs_quartic(e_prev, environment, theta_i) + 2.0 * tr_mr * m**2
    return float(np.real(np.conj(e) @ g1 @ e)) + const


def _rate_constraint_data(
    w: np.ndarray, channels: ChannelSet, config: SystemConfig
):
    """Quadratic-form data (F_k, d_k, l_k) of each user's SINR constraint in e.

    Channels are noise-normalized so the constant absorbs the unit noise term.
    Constraint: e^H F_k e + 2 Re(e^H d_k) + l_k <= 0.
    """
    k = config.n_users
    omegas = _sinr_targets(config)
    noise_amp = np.sqrt(np.asarray(config.user_noise))
    out = []
    # per beam column i: h_k^H w_i = c[k, i] + e^H dvec[k][:, i]
    c = (np.conj(channels.h_bu) @ w) / noise_amp[:, None]
    hw = channels.h_bi @ w  # M x K~
    for idx in range(k):
        dvec = (np.conj(channels.h_iu[idx])[:, None] * hw) / noise_amp[idx]
        others = [i for i in range(w.shape[1]) if i != idx]
        f_mat = omegas[idx] * dvec[:, others] @ dvec[:, others].conj().T
        f_mat -= np.outer(dvec[:, idx], dvec[:, idx].conj())
        d_lin = omegas[idx] * (dvec[:, others] @ np.conj(c[idx, others]))
        d_lin -= np.conj(c[idx, idx]) * dvec[:, idx]
        l_const = omegas[idx] * (
            float(np.sum(np.abs(c[idx, others]) ** 2)) + 1.0
        ) - abs(c[idx, idx]) ** 2
        out.append((0.5 * (f_mat + f_mat.conj().T), d_lin, l_const))
    return out


def irs_ccp_step(
    ccp: CcpState,
    w: np.ndarray,
    channels: ChannelSet,
    environment: RadarEnvironment,
    config: SystemConfig,
    options: Alg1Options,
) -> CcpState:
    """One penalized convex-concave step of the phase subproblem.

    Solves a second-order cone program in (e, f): convexified surrogate
    objective plus penalty on the unit-modulus relaxation slacks.
    """
    m = config.n_irs_elements
    e_prev = np.asarray(ccp.e_current)
    g1 = g1_matrix(e_prev, environment, channels.theta_i)
    g1_shifted, _ = psd_shift(g1)
    g1_factor = psd_factor(g1_shifted).factor

    e_var = cp.Variable(m, complex=True)
    f_var = cp.Variable(2 * m, nonneg=True)
    constraints = []
    for f_mat, d_lin, l_const in _rate_constraint_data(w, channels, config):
        f_shifted, lam = psd_shift(f_mat)
        factor = psd_factor(f_shifted).factor
        quad = cp.sum_squares(factor.conj().T @ e_var) if factor.size else 0.0
        constraints.append(
            quad
            + lam * m
            + 2.0 * cp.real(np.conj(d_lin) @ e_var)
            + l_const
            <= 0.0
        )
    constraints.append(cp.square(cp.abs(e_var)) <= 1.0 + f_var[m:])
    constraints.append(
        np.abs(e_prev) ** 2 - 2.0 * cp.real(cp.multiply(np.conj(e_prev), e_var))
        <= f_var[:m] - 1.0
    )
    objective = cp.sum_squares(g1_factor.conj().T @ e_var) + ccp.rho * cp.sum(f_var)

    prog = ConeProgram().minimize(objective).add(constraints)
    solution = prog.solve(options.solver_tol)
    if solution.status is SolveStatus.INFEASIBLE:
        raise CcpInfeasibleError("phase subproblem infeasible at current iterate")
    if not solution.ok:
        raise ConicError(solution.status, "phase subproblem failed")
    return CcpState(
        e_current=np.asarray(e_var.value),
        slack=np.maximum(np.asarray(f_var.value), 0.0),
        rho=min(options.mu * ccp.rho, options.rho_max),
        tau=ccp.tau + 1,
        objective=solution.objective,
    )


def _check_simplified(scenario: Scenario) -> None:
    if not scenario.los_mode:
        raise SimplifiedCaseError(
            "this pipeline requires a LoS BS-IRS channel; use the generalized one"
        )
    if scenario.environment.r_clutter.rank != 0:
        raise SimplifiedCaseError(
            "this pipeline requires an empty clutter set; use the generalized one"
        )


def _inner_ccp(
    e_init: np.ndarray,
    w: np.ndarray,
    scenario: Scenario,
    options: Alg1Options,
) -> CcpState:
    ch, env = scenario.channels, scenario.environment
    ccp = CcpState(
        e_current=np.asarray(e_init),
        slack=np.zeros(2 * scenario.config.n_irs_elements),
        rho=options.rho0,
        tau=0,
    )
    # progress is measured on the physical quartic, not the shifted surrogate,
    # whose large additive constant would make a relative test meaningless
    prev_q = irs_quartic(ccp.e_current, env, ch.theta_i)
    while ccp.tau < options.tau_max:
        ccp = irs_ccp_step(ccp, w, ch, env, scenario.config, options)
        q = irs_quartic(ccp.e_current, env, ch.theta_i)
        settled = abs(q - prev_q) <= options.eps_inner * max(abs(prev_q), 1e-12)
        if settled and ccp.slack_l1 <= options.eps_modulus:
            break
        prev_q = q
    return ccp


def run_alg1(
    scenario: Scenario,
    options: Alg1Options | None = None,
    comm_only: bool = False,
    observer=None,
) -> tuple[BeamformingState, RunTrace]:
    """Full alternating optimization with restart handling.

    Alternates the globally-solved BS step with the penalized phase loop until
    the traced objective's fractional increase falls below the outer
    tolerance.  An infeasible phase subproblem triggers a restart from fresh
    random phases, up to the configured budget.  `observer`, when given, is
    called with the state after every outer iteration (read-only inspection).
    """
    options = options or Alg1Options()
    _check_simplified(scenario)
    cfg, ch, env = scenario.config, scenario.channels, scenario.environment
    rng = np.random.default_rng(options.seed)
    trace = RunTrace(scheme="cbo" if comm_only else "alg1")

    iteration = 0
    best: tuple[float, BeamformingState] | None = None
    restarts = 0
    exit_reason = "outer_cap"
    first_attempt = True
    while True:
        if first_attempt:
            # start from phases aligned with the strongest target's cascade;
            # the quartic is globally maximized there, which shortens the
            # climb dramatically compared to a random start
            m_vecs, strengths = _target_projections(env, ch.theta_i, cfg.n_irs_elements)
            e = np.exp(1j * np.angle(m_vecs[:, int(np.argmax(strengths))]))
            first_attempt = False
        else:
            e = random_phases(rng, cfg.n_irs_elements)
        try:
            mi_prev = None
            for _ in range(options.max_outer):
                started = time.perf_counter()
                if comm_only:
                    state = comm_only_sdp(e, ch, cfg, tol=options.solver_tol)
                else:
                    c_x, w_blocks = bs_sdp(e, ch, cfg, tol=options.solver_tol)
                    state = rank1_recover(c_x, w_blocks, e, ch, cfg)
                ccp = _inner_ccp(e, state.w, scenario, options)
                e = project_phases(ccp.e_current)
                state = state.with_e(e)
                mi = sensing_mi(state, ch, env, cfg)
                iteration += 1
                trace.append(
                    IterationRecord(
                        iteration=iteration,
                        mi_nats=mi,
                        rates=all_rates(state, ch, cfg),
                        power=state.power,
                        slack_norm=ccp.slack_l1,
                        penalty=ccp.rho,
                        wall_clock_ms=(time.perf_counter() - started) * 1e3,
                    )
                )
                if observer is not None:
                    observer(state)
                if best is None or mi > best[0]:
                    best = (mi, state)
                if mi_prev is not None and mi - mi_prev <= options.eps_outer * max(
                    abs(mi_prev), 1e-12
                ):
                    exit_reason = "outer_converged"
                    break
                mi_prev = mi
            break
        except (CcpInfeasibleError, InfeasibleRatesError):
            restarts += 1
            if restarts > options.restart_budget:
                exit_reason = "restart_budget_exhausted"
                break
    trace.restarts = restarts
    trace.finish(exit_reason)
    if best is None:
        raise CcpInfeasibleError(
            "no feasible iterate found within the restart budget"
        )
    return best[1], trace
