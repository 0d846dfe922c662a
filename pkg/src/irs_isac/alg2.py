"""Generalized alternating optimization: Rician channels and clutter.

The objective is handled through a matrix-inversion-lemma rewrite of the MI
difference, minorized at each iterate by a concave quadratic in the
beamformer.  The beamformer step is then an SOCP with successively
convexified rate constraints; the phase step lifts the reflection vector to a
rank-relaxed PSD matrix and extracts phases by Gaussian randomization.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import cvxpy as cp
import numpy as np

from .alg1 import (
    InfeasibleRatesError,
    bs_sdp,
    project_phases,
    rank1_recover,
)
from .conic import ConeProgram, ConicError, SolveStatus
from .metrics import BeamformingState, all_rates, effective_channels
from .scene import ChannelSet, RadarEnvironment, Scenario, SystemConfig, steering
from .tensorlin import kron, logdet_hpd, psd_factor
from .trace import IterationRecord, RunTrace

CONDITION_LIMIT = 1e12


class SingularSurrogateError(RuntimeError):
    """The surrogate's inner matrix is too ill-conditioned to invert safely."""


@dataclass(frozen=True)
class Alg2Options:
    eps_outer: float = 1e-5
    max_outer: int = 30
    inner_cap: int = 20
    inner_tol: float = 1e-5
    n_randomizations: int = 1000
    solver_tol: float = 1e-8
    seed: int = 0

    def __post_init__(self):
        if self.max_outer < 1 or self.inner_cap < 1 or self.n_randomizations < 1:
            raise ValueError("iteration and draw counts must be >= 1")


@dataclass(frozen=True)
class MmTerms:
    """Expansion-point data of the concave quadratic surrogate."""

    a_bar: np.ndarray  # M^2 x n_w
    b: np.ndarray  # n_w x n_w, PSD
    n_inner: np.ndarray  # r x r
    const3: float
    eta: float


def _kron_factors(channels: ChannelSet, e: np.ndarray):
    e_phys = np.conj(np.asarray(e))
    x1 = channels.h_bi.T * e_phys[None, :]
    x2 = channels.h_bi.conj().T * np.conj(e_phys)[None, :]
    return x1, x2


def _response_map(w: np.ndarray, channels: ChannelSet, e: np.ndarray) -> np.ndarray:
    """P = (I kron W^H) A as an explicit n_w x M^2 matrix."""
    x1, x2 = _kron_factors(channels, e)
    return kron(x1, w.conj().T @ x2)


def mi_general(
    state: BeamformingState,
    channels: ChannelSet,
    environment: RadarEnvironment,
    config: SystemConfig,
) -> float:
    """Sensing MI via the inversion-lemma route; must match the direct form."""
    eta = config.snapshot_length / config.radar_noise
    p = _response_map(state.w, channels, state.e)
    f_r = environment.r_target.factor.factor
    f_c = environment.r_clutter.factor.factor
    y_rc = p @ np.hstack([f_r, f_c])
    n_w = p.shape[0]
    t = np.eye(n_w) + eta * y_rc @ y_rc.conj().T
    y_r = p @ f_r
    r = y_r.shape[1]
    n_inner = np.eye(r) - eta * y_r.conj().T @ np.linalg.solve(t, y_r)
    return -logdet_hpd(n_inner)


def mm_terms(
    w: np.ndarray,
    e: np.ndarray,
    channels: ChannelSet,
    environment: RadarEnvironment,
    config: SystemConfig,
) -> MmTerms:
    """Surrogate data at the expansion point (w, e).

    The surrogate value at any state is
    2 eta Re Tr(a_bar P) - eta^2 Tr(B P R_RC P^H) + const3,
    tangent to the true objective at the point and below it elsewhere.
    """
    eta = config.snapshot_length / config.radar_noise
    p = _response_map(w, channels, e)
    f_r = environment.r_target.factor.factor
    f_c = environment.r_clutter.factor.factor
    f_rc = np.hstack([f_r, f_c])
    n_w = p.shape[0]
    y_rc = p @ f_rc
    t = np.eye(n_w) + eta * y_rc @ y_rc.conj().T
    y_r = p @ f_r
    z = np.linalg.solve(t, y_r)  # T^{-1} Y
    r = y_r.shape[1]
    n_inner = np.eye(r) - eta * y_r.conj().T @ z
    n_inner = 0.5 * (n_inner + n_inner.conj().T)
    if r and np.linalg.cond(n_inner) > CONDITION_LIMIT:
        raise SingularSurrogateError("surrogate inner matrix nearly singular")
    zn = z @ np.linalg.inv(n_inner) if r else z
    a_bar = f_r @ zn.conj().T  # M^2 x n_w
    b = zn @ z.conj().T
    b = 0.5 * (b + b.conj().T)
    f_point = -logdet_hpd(n_inner) if r else 0.0
    lin_at_point = 2.0 * eta * np.real(np.sum(a_bar * p.T)) - eta**2 * float(
        np.real(np.sum(np.conj(y_rc) * (b @ y_rc)))
    )
    return MmTerms(
        a_bar=a_bar, b=b, n_inner=n_inner, const3=f_point - lin_at_point, eta=eta
    )


def surrogate_value(
    w: np.ndarray,
    e: np.ndarray,
    terms: MmTerms,
    channels: ChannelSet,
    environment: RadarEnvironment,
) -> float:
    """Evaluate the minorizer at an arbitrary state."""
    p = _response_map(w, channels, e)
    f_rc = np.hstack(
        [environment.r_target.factor.factor, environment.r_clutter.factor.factor]
    )
    y_rc = p @ f_rc
    lin = 2.0 * terms.eta * np.real(np.sum(terms.a_bar * p.T))
    quad = terms.eta**2 * float(np.real(np.sum(np.conj(y_rc) * (terms.b @ y_rc))))
    return lin - quad + terms.const3


def _lifted_channels(channels: ChannelSet) -> list[np.ndarray]:
    """Per-user (M+1) x N maps H_k with h_k^H = [e; 1]^H H_k."""
    out = []
    for idx in range(channels.h_iu.shape[0]):
        d_k = np.diag(np.conj(channels.h_iu[idx])) @ channels.h_bi
        out.append(np.vstack([d_k, np.conj(channels.h_bu[idx])[None, :]]))
    return out


def w_socp_step(
    w_prev: np.ndarray,
    e_fixed: np.ndarray,
    terms: MmTerms,
    channels: ChannelSet,
    environment: RadarEnvironment,
    config: SystemConfig,
    tol: float = 1e-8,
) -> np.ndarray:
    """Beamformer update: maximize the surrogate under convexified rates.

    The surrogate's quadratic penalty enters through per-scatterer columns of
    P's low-rank image, keeping the program at SOCP size; the rate
    constraints linearize the desired-signal power at w_prev.
    """
    n, k = config.n_bs_antennas, config.n_users
    k_tilde = w_prev.shape[1]
    eta = terms.eta
    x1, x2 = _kron_factors(channels, e_fixed)

    w_var = cp.Variable((n, k_tilde), complex=True)

    # linear surrogate term: Tr(a_bar P) = Tr(C_tot W^H)
    m_map = kron(x1, x2) @ terms.a_bar  # N^2 x n_w
    c_tot = np.zeros((n, k_tilde), dtype=complex)
    for blk in range(n):
        c_tot += m_map[blk * n : (blk + 1) * n, blk * k_tilde : (blk + 1) * k_tilde]
    lin_term = 2.0 * eta * cp.real(cp.sum(cp.multiply(np.conj(c_tot), w_var)))

    # quadratic surrogate term through the scatterer columns of P F_RC, each
    # of which is linear in W: kron(x1, W^H x2) vec(F) = vec(W^H x2 F x1^T)
    env_factors = np.hstack(
        [environment.r_target.factor.factor, environment.r_clutter.factor.factor]
    )
    l_b = psd_factor(terms.b).factor  # n_w x r_b
    m = len(e_fixed)
    n_w = n * k_tilde
    g_cols = [
        cp.reshape(
            cp.vec(w_var.H @ (x2 @ f.reshape(m, m, order="F") @ x1.T), order="F"),
            (n_w, 1),
            order="F",
        )
        for f in env_factors.T
    ]
    if g_cols:
        g = g_cols[0] if len(g_cols) == 1 else cp.hstack(g_cols)
        quad_term = eta**2 * cp.sum_squares(l_b.conj().T @ g)
    else:
        quad_term = cp.Constant(0.0)

    constraints = [cp.sum_squares(cp.vec(w_var, order="F")) <= config.power_budget]
    rows = effective_channels(channels, e_fixed)
    noise_amp = np.sqrt(np.asarray(config.user_noise))
    omegas = 2.0 ** np.asarray(config.rate_thresholds) - 1.0
    for idx in range(k):
        h = rows[idx] / noise_amp[idx]
        gains = h @ w_var  # 1 x k_tilde
        g_prev = h @ w_prev
        lin_signal = 2.0 * cp.real(np.conj(g_prev[idx]) * gains[idx]) - abs(
            g_prev[idx]
        ) ** 2
        others = [i for i in range(k_tilde) if i != idx]
        interference = cp.sum_squares(cp.hstack([gains[i] for i in others]))
        constraints.append(lin_signal >= omegas[idx] * (interference + 1.0))

    prog = ConeProgram().maximize(lin_term - quad_term).add(constraints)
    solution = prog.solve(tol)
    if solution.status is SolveStatus.INFEASIBLE:
        raise InfeasibleRatesError("beamformer step infeasible at the SCA point")
    if not solution.ok:
        raise ConicError(solution.status, "beamformer step failed")
    return np.asarray(w_var.value)


def phase_quadratic(
    w_fixed: np.ndarray,
    terms: MmTerms,
    channels: ChannelSet,
    environment: RadarEnvironment,
    config: SystemConfig,
) -> tuple[np.ndarray, np.ndarray]:
    """Surrogate as a quadratic form in j = vec(e e^H).

    Returns (v_bar, c_lin) with surrogate(e) - const3 equal to
    2 eta Re(conj(c_lin) . j) - eta^2 j^H v_bar j.
    """
    w_tilde_h = kron(np.eye(config.n_bs_antennas), w_fixed.conj().T)
    hh = kron(channels.h_bi.T, channels.h_bi.conj().T)
    v = w_tilde_h @ hh  # n_w x M^2
    r_rc = (
        environment.r_target.matrix + environment.r_clutter.matrix
    )  # M^2 x M^2 dense; acceptable at the supported sizes
    v_bar = (v.conj().T @ terms.b @ v) * r_rc.T
    v_bar = 0.5 * (v_bar + v_bar.conj().T)
    c_lin = np.conj(np.sum(v * terms.a_bar.T, axis=0))  # entries conj(diag(a_bar v))
    return v_bar, c_lin


def e_sdp_step(
    w_fixed: np.ndarray,
    e_prev: np.ndarray,
    channels: ChannelSet,
    environment: RadarEnvironment,
    config: SystemConfig,
    tol: float = 1e-8,
) -> np.ndarray:
    """Phase update: rank-relaxed lift of [e; 1] under the same surrogate.

    Returns the relaxed (M+1) x (M+1) PSD matrix with unit diagonal; phases
    are extracted separately by randomization.
    """
    m = len(e_prev)
    terms = mm_terms(w_fixed, e_prev, channels, environment, config)
    eta = terms.eta
    v_bar, c_lin = phase_quadratic(w_fixed, terms, channels, environment, config)
    l_v = psd_factor(v_bar).factor

    prog = ConeProgram()
    lift = prog.hermitian_psd_var(m + 1)
    j_expr = cp.vec(lift.expr[:m, :m], order="F")
    objective = eta**2 * cp.sum_squares(l_v.conj().T @ j_expr) - 2.0 * eta * cp.real(
        np.conj(c_lin) @ j_expr
    )
    prog.minimize(objective)
    prog.add(cp.diag(lift.expr) == 1.0)

    omegas = 2.0 ** np.asarray(config.rate_thresholds) - 1.0
    for idx, h_map in enumerate(_lifted_channels(channels)):
        scale = 1.0 / config.user_noise[idx]
        q_all = scale * (h_map @ w_fixed) @ (h_map @ w_fixed).conj().T
        q_sig = scale * np.outer(
            h_map @ w_fixed[:, idx], np.conj(h_map @ w_fixed[:, idx])
        )
        gain_sig = cp.real(cp.trace(q_sig @ lift.expr))
        gain_all = cp.real(cp.trace(q_all @ lift.expr))
        prog.add(
            (1.0 + omegas[idx]) * gain_sig >= omegas[idx] * (gain_all + 1.0)
        )

    solution = prog.solve(tol)
    if solution.status is SolveStatus.INFEASIBLE:
        raise InfeasibleRatesError("phase lift infeasible at the current beamformer")
    if not solution.ok:
        raise ConicError(solution.status, "phase lift step failed")
    return lift.value


def gaussian_randomize(
    e_tilde: np.ndarray,
    w_fixed: np.ndarray,
    e_prev: np.ndarray,
    channels: ChannelSet,
    environment: RadarEnvironment,
    config: SystemConfig,
    n: int,
    seed: int,
) -> tuple[np.ndarray, bool]:
    """Extract unit-modulus phases from the relaxed lift.

    Draws candidates, keeps those meeting every rate threshold at the fixed
    beamformer, and returns the MI-best one; falls back to e_prev when no
    candidate is feasible.
    """
    m = len(e_prev)
    rng = np.random.default_rng(seed)
    vals, vecs = np.linalg.eigh(0.5 * (e_tilde + e_tilde.conj().T))
    root = vecs * np.sqrt(np.maximum(vals, 0.0))
    q = (
        rng.standard_normal((m + 1, n)) + 1j * rng.standard_normal((m + 1, n))
    ) / np.sqrt(2.0)
    draws = root @ q  # (M+1) x n
    best_mi = -np.inf
    best_e = None
    thresholds = np.asarray(config.rate_thresholds)
    for i in range(n):
        anchor = draws[m, i]
        if abs(anchor) < 1e-12:
            continue
        cand = np.exp(1j * np.angle(draws[:m, i] / anchor))
        state = BeamformingState(
            w_c=w_fixed[:, : config.n_users],
            w_r=w_fixed[:, config.n_users :],
            e=cand,
        )
        rates = all_rates(state, channels, config)
        if any(r < thr - 1e-9 for r, thr in zip(rates, thresholds)):
            continue
        mi = mi_general(state, channels, environment, config)
        if mi > best_mi:
            best_mi, best_e = mi, cand
    if best_e is None:
        return np.asarray(e_prev), False
    return best_e, True


def initialize(scenario: Scenario, seed: int, tol: float = 1e-8) -> BeamformingState:
    """Feasibility-oriented starting point.

    Phase 1 picks reflection phases maximizing the SINR-weighted sum of
    effective channel gains through a rank-relaxed lift; phase 2 builds a
    feasible beamformer at those phases through the relaxed BS program.
    """
    cfg, ch = scenario.config, scenario.channels
    m = cfg.n_irs_elements
    omegas = 2.0 ** np.asarray(cfg.rate_thresholds) - 1.0
    weights = 1.0 / (omegas * np.asarray(cfg.user_noise))

    q_total = np.zeros((m + 1, m + 1), dtype=complex)
    for idx, h_map in enumerate(_lifted_channels(ch)):
        q_total += weights[idx] * h_map @ h_map.conj().T
    prog = ConeProgram()
    lift = prog.hermitian_psd_var(m + 1)
    prog.maximize(cp.real(cp.trace(q_total @ lift.expr)))
    prog.add(cp.diag(lift.expr) == 1.0)
    solution = prog.solve(tol)
    if not solution.ok:
        raise ConicError(solution.status, "initialization lift failed")

    # randomize without constraints; rank the weighted channel gain directly
    rng = np.random.default_rng(seed)
    vals, vecs = np.linalg.eigh(lift.value)
    root = vecs * np.sqrt(np.maximum(vals, 0.0))
    q = (
        rng.standard_normal((m + 1, 256)) + 1j * rng.standard_normal((m + 1, 256))
    ) / np.sqrt(2.0)
    draws = root @ q
    best_gain, best_e = -np.inf, None
    for i in range(draws.shape[1]):
        anchor = draws[m, i]
        if abs(anchor) < 1e-12:
            continue
        cand = np.exp(1j * np.angle(draws[:m, i] / anchor))
        lifted = np.concatenate([cand, [1.0]])
        gain = float(np.real(lifted.conj() @ q_total @ lifted))
        if gain > best_gain:
            best_gain, best_e = gain, cand
    e0 = best_e if best_e is not None else project_phases(np.ones(m, dtype=complex))

    c_x, w_blocks = bs_sdp(e0, ch, cfg, tol=tol)
    return rank1_recover(c_x, w_blocks, e0, ch, cfg)


def sensing_aligned_candidates(
    scenario: Scenario, options: Alg2Options, n_candidates: int = 64
) -> list[np.ndarray]:
    """Phases maximizing the reflected power toward the targets, best first.

    Rank-relaxed lift of max e^H Q e over unit-modulus e, where Q sums the
    per-target cascade Gram matrices; candidates come from randomization and
    are ordered by the quadratic form so callers can fall back when the top
    pick leaves the rate constraints infeasible.
    """
    ch, env = scenario.channels, scenario.environment
    m = scenario.config.n_irs_elements
    q_total = np.zeros((m, m), dtype=complex)
    for theta, beta_sq in zip(env.target_angles, env.target_strengths):
        d = np.diag(np.conj(steering(theta, m))) @ ch.h_bi
        q_total += beta_sq * d @ d.conj().T
    q_total = 0.5 * (q_total + q_total.conj().T)
    # the argmax is scale-invariant; normalize so the objective is not
    # dwarfed by the solver tolerances at physical channel magnitudes
    scale = np.linalg.norm(q_total, 2)
    if scale > 0.0:
        q_total = q_total / scale

    prog = ConeProgram()
    lift = prog.hermitian_psd_var(m)
    prog.maximize(cp.real(cp.trace(q_total @ lift.expr)))
    prog.add(cp.diag(lift.expr) == 1.0)
    solution = prog.solve(options.solver_tol)
    if not solution.ok:
        raise ConicError(solution.status, "sensing-only phase lift failed")

    rng = np.random.default_rng(options.seed)
    vals, vecs = np.linalg.eigh(lift.value)
    root = vecs * np.sqrt(np.maximum(vals, 0.0))
    draws = root @ (
        (
            rng.standard_normal((m, n_candidates))
            + 1j * rng.standard_normal((m, n_candidates))
        )
        / np.sqrt(2.0)
    )
    candidates = [np.exp(1j * np.angle(draws[:, i])) for i in range(n_candidates)]
    # deterministic leading-eigenvector pick; exact when the lift is rank one
    candidates.append(np.exp(1j * np.angle(vecs[:, -1])))
    gains = [float(np.real(c.conj() @ q_total @ c)) for c in candidates]
    order = np.argsort(gains)[::-1]
    return [candidates[i] for i in order]


def optimize_w_given_e(
    e: np.ndarray,
    scenario: Scenario,
    options: Alg2Options,
    w_init: np.ndarray | None = None,
) -> BeamformingState:
    """Surrogate-driven beamformer optimization at frozen phases."""
    cfg, ch, env = scenario.config, scenario.channels, scenario.environment
    if w_init is None:
        c_x, w_blocks = bs_sdp(e, ch, cfg, tol=options.solver_tol)
        w = rank1_recover(c_x, w_blocks, e, ch, cfg).w
    else:
        w = w_init
    state = BeamformingState(
        w_c=w[:, : cfg.n_users], w_r=w[:, cfg.n_users :], e=np.asarray(e)
    )
    prev = mi_general(state, ch, env, cfg)
    for _ in range(options.inner_cap):
        try:
            terms = mm_terms(state.w, e, ch, env, cfg)
            w_next = w_socp_step(
                state.w, e, terms, ch, env, cfg, tol=options.solver_tol
            )
        except SingularSurrogateError:
            break
        candidate = state.with_w(
            w_next[:, : cfg.n_users], w_next[:, cfg.n_users :]
        )
        mi = mi_general(candidate, ch, env, cfg)
        if mi < prev:
            break
        state = candidate
        if mi - prev <= options.inner_tol * max(abs(prev), 1e-12):
            prev = mi
            break
        prev = mi
    return state


def run_alg2(
    scenario: Scenario, options: Alg2Options | None = None, observer=None
) -> tuple[BeamformingState, RunTrace]:
    """Full generalized loop: surrogate beamformer passes plus phase lifts.

    `observer`, when given, is called with the state after every outer
    iteration (read-only inspection).
    """
    options = options or Alg2Options()
    cfg, ch, env = scenario.config, scenario.channels, scenario.environment
    trace = RunTrace(scheme="alg2")
    state = initialize(scenario, seed=options.seed, tol=options.solver_tol)
    mi_prev = mi_general(state, ch, env, cfg)
    # second starting point: phases aligned with the target cascades (the
    # separate-optimization pick).  The outer loop is monotone, so starting
    # from the better of the two keeps the final objective from landing in a
    # basin below the simpler scheme's.
    for e_aligned in sensing_aligned_candidates(scenario, options):
        try:
            aligned = optimize_w_given_e(e_aligned, scenario, options)
        except (InfeasibleRatesError, ConicError):
            continue
        mi_aligned = mi_general(aligned, ch, env, cfg)
        if mi_aligned > mi_prev:
            state, mi_prev = aligned, mi_aligned
        break

    exit_reason = "outer_cap"
    for outer in range(1, options.max_outer + 1):
        started = time.perf_counter()
        state = optimize_w_given_e(state.e, scenario, options, w_init=state.w)
        e_lift = e_sdp_step(
            state.w, state.e, ch, env, cfg, tol=options.solver_tol
        )
        e_new, found = gaussian_randomize(
            e_lift,
            state.w,
            state.e,
            ch,
            env,
            cfg,
            options.n_randomizations,
            seed=options.seed + outer,
        )
        candidate = state.with_e(e_new)
        mi_candidate = mi_general(candidate, ch, env, cfg)
        if found and mi_candidate >= mi_prev:
            state = candidate
            mi = mi_candidate
        else:
            trace.stalls += 1
            mi = mi_general(state, ch, env, cfg)
        if observer is not None:
            observer(state)
        trace.append(
            IterationRecord(
                iteration=outer,
                mi_nats=mi,
                rates=all_rates(state, ch, cfg),
                power=state.power,
                slack_norm=0.0,
                penalty=0.0,
                wall_clock_ms=(time.perf_counter() - started) * 1e3,
            )
        )
        if outer > 1 and mi - mi_prev <= options.eps_outer * max(abs(mi_prev), 1e-12):
            exit_reason = "outer_converged"
            mi_prev = mi
            break
        mi_prev = mi
    trace.finish(exit_reason)
    return state, trace
