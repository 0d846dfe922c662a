"""Baseline schemes the joint designs are compared against.

Each baseline returns the same (state, trace) pair as the main pipelines so
the experiment harness can treat all schemes uniformly.  The beamformer step
always enforces the rate and power constraints; only the phase selection rule
differs between schemes.
"""

from __future__ import annotations

import time

import numpy as np

from .alg1 import (
    InfeasibleRatesError,
    bs_sdp,
    comm_only_sdp,
    random_phases,
    rank1_recover,
    run_alg1,
)
from .alg2 import (
    Alg2Options,
    initialize,
    optimize_w_given_e,
    sensing_aligned_candidates,
)
from .conic import ConicError
from .metrics import BeamformingState, all_rates, sensing_mi
from .scene import Scenario
from .trace import IterationRecord, RunTrace


def _is_simplified(scenario: Scenario) -> bool:
    return scenario.los_mode and scenario.environment.r_clutter.rank == 0


def _single_record_trace(
    scheme: str, state: BeamformingState, scenario: Scenario, started: float
) -> RunTrace:
    trace = RunTrace(scheme=scheme)
    trace.append(
        IterationRecord(
            iteration=1,
            mi_nats=sensing_mi(
                state, scenario.channels, scenario.environment, scenario.config
            ),
            rates=all_rates(state, scenario.channels, scenario.config),
            power=state.power,
            slack_norm=0.0,
            penalty=0.0,
            wall_clock_ms=(time.perf_counter() - started) * 1e3,
        )
    )
    trace.finish("baseline_done")
    return trace


def _beamformer_at_phases(
    e: np.ndarray, scenario: Scenario, options: Alg2Options
) -> BeamformingState:
    """Rate-constrained beamformer at frozen phases, routed by scenario type."""
    if _is_simplified(scenario):
        c_x, blocks = bs_sdp(
            e, scenario.channels, scenario.config, tol=options.solver_tol
        )
        return rank1_recover(c_x, blocks, e, scenario.channels, scenario.config)
    return optimize_w_given_e(e, scenario, options)


def run_cbo(
    scenario: Scenario, options: Alg2Options | None = None
) -> tuple[BeamformingState, RunTrace]:
    """Communication-only design: no sensing beam, phases chosen for rates."""
    options = options or Alg2Options()
    if _is_simplified(scenario):
        state, trace = run_alg1(scenario, comm_only=True)
        return state, trace
    started = time.perf_counter()
    init = initialize(scenario, seed=options.seed, tol=options.solver_tol)
    state = comm_only_sdp(
        init.e, scenario.channels, scenario.config, tol=options.solver_tol
    )
    return state, _single_record_trace("cbo", state, scenario, started)


def run_so(
    scenario: Scenario, options: Alg2Options | None = None
) -> tuple[BeamformingState, RunTrace]:
    """Sensing-oriented phases first, then a rate-constrained beamformer."""
    options = options or Alg2Options()
    started = time.perf_counter()
    last_error: Exception | None = None
    for e in sensing_aligned_candidates(scenario, options):
        try:
            state = _beamformer_at_phases(e, scenario, options)
        except (InfeasibleRatesError, ConicError) as exc:
            last_error = exc
            continue
        return state, _single_record_trace("so", state, scenario, started)
    raise InfeasibleRatesError(
        "no sensing-aligned phase candidate admits a rate-feasible beamformer"
    ) from last_error


def run_random(
    scenario: Scenario, options: Alg2Options | None = None
) -> tuple[BeamformingState, RunTrace]:
    """Uniform random phases, then a rate-constrained beamformer."""
    options = options or Alg2Options()
    started = time.perf_counter()
    rng = np.random.default_rng(options.seed)
    last_error: Exception | None = None
    for _ in range(8):
        e = random_phases(rng, scenario.config.n_irs_elements)
        try:
            state = _beamformer_at_phases(e, scenario, options)
        except (InfeasibleRatesError, ConicError) as exc:
            last_error = exc
            continue
        return state, _single_record_trace("random", state, scenario, started)
    raise InfeasibleRatesError(
        "no random phase draw admits a rate-feasible beamformer"
    ) from last_error
