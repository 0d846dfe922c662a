"""Experiment harness: config ingestion, seeded sweeps, CSV/JSON outputs.

Config files are flat ``key = value`` text (``#`` comments allowed) grouped
by dotted prefixes: ``system.*``, ``geometry.*``, ``environment.*``,
``experiment.*``, ``solver.*``, and the top-level ``seeds``.  Unknown keys
are rejected with the offending line number.  All numeric CSV output uses
``%.10e`` formatting, UTF-8 encoding, and LF line endings so identical
inputs yield identical bytes (timing values excepted, as they measure the
host).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import __version__
from .alg1 import Alg1Options, run_alg1
from .alg2 import Alg2Options, run_alg2
from .bench import run_cbo, run_random, run_so
from .metrics import BeamformingState, beampattern, evaluate
from .scene import (
    Geometry,
    RadarEnvironment,
    Scenario,
    SystemConfig,
    dbm_to_watts,
    make_scenario,
)
from .trace import RunTrace

EXPERIMENT_IDS = (
    "convergence",
    "mi_vs_rate",
    "mi_vs_elements",
    "mi_vs_clutter",
    "beampattern",
    "timing",
)
SCHEME_NAMES = ("alg1", "alg2", "cbo", "so", "random")

# experiments whose figure family lives in the LoS / no-clutter regime; every
# scheme in them runs on the simplified scenario
SIMPLIFIED_EXPERIMENTS = frozenset({"mi_vs_rate", "mi_vs_elements", "timing"})

DEFAULT_SCHEMES = {
    "convergence": ("alg1", "alg2"),
    "mi_vs_rate": ("alg1", "cbo", "so", "random"),
    "mi_vs_elements": ("alg1", "cbo", "so", "random"),
    "mi_vs_clutter": ("alg2", "cbo", "so", "random"),
    "beampattern": ("alg1", "alg2"),
    "timing": ("alg1", "alg2"),
}
SWEEP_NAMES = {
    "convergence": "iteration",
    "mi_vs_rate": "rate_bits",
    "mi_vs_elements": "n_irs_elements",
    "mi_vs_clutter": "n_clutter",
    "beampattern": "index",
    "timing": "iteration",
}

PROFILES = {
    "desk": dict(n_bs_antennas=4, n_irs_elements=16, n_users=2),
    "paper": dict(n_bs_antennas=8, n_irs_elements=32, n_users=3),
}
DEFAULT_SEEDS = {"desk": (0, 1, 2, 3, 4), "paper": (0, 1, 2, 3, 4)}

BEAMPATTERN_GRID = np.arange(-90.0, 90.0 + 1e-9, 0.5)


class ConfigError(ValueError):
    """Malformed or unknown configuration content, with line context."""


@dataclass(frozen=True)
class SolverSettings:
    tol: float = 1e-8
    max_outer: int = 30
    inner_cap: int = 20
    n_randomizations: int = 1000


@dataclass(frozen=True)
class ExperimentSpec:
    experiment_id: str
    grid: tuple[float, ...]
    seeds: tuple[int, ...]
    schemes: tuple[str, ...]
    output_dir: str
    los_mode: bool
    solver: SolverSettings

    def __post_init__(self):
        if self.experiment_id not in EXPERIMENT_IDS:
            raise ConfigError(f"unknown experiment id {self.experiment_id!r}")
        if not self.grid:
            raise ConfigError("experiment grid must be non-empty")
        if not self.seeds:
            raise ConfigError("seed list must be non-empty")
        for scheme in self.schemes:
            if scheme not in SCHEME_NAMES:
                raise ConfigError(f"unknown scheme {scheme!r}")


@dataclass(frozen=True)
class LoadedConfig:
    spec: ExperimentSpec
    system: SystemConfig
    geometry: Geometry
    environment: RadarEnvironment
    config_hash: str


def _parse_scalar(raw: str, kind, key: str, line_no: int):
    try:
        if kind is bool:
            lowered = raw.strip().lower()
            if lowered in {"true", "yes", "1"}:
                return True
            if lowered in {"false", "no", "0"}:
                return False
            raise ValueError(raw)
        return kind(raw.strip())
    except ValueError as exc:
        raise ConfigError(
            f"line {line_no}: key {key!r} expects {kind.__name__}, got {raw.strip()!r}"
        ) from exc


_EMPTY_LIST_OK = {"environment.clutter_angles", "environment.clutter_strengths"}


def _parse_list(raw: str, kind, key: str, line_no: int) -> tuple:
    items = [piece for piece in raw.split(",") if piece.strip()]
    if not items:
        if key in _EMPTY_LIST_OK:
            return ()
        raise ConfigError(f"line {line_no}: key {key!r} expects a non-empty list")
    return tuple(_parse_scalar(piece, kind, key, line_no) for piece in items)


# key -> (target group, field, parser kind, is_list)
CONFIG_SCHEMA = {
    "system.n_bs_antennas": ("system", "n_bs_antennas", int, False),
    "system.n_irs_elements": ("system", "n_irs_elements", int, False),
    "system.n_users": ("system", "n_users", int, False),
    "system.snapshot_length": ("system", "snapshot_length", int, False),
    "system.power_budget_dbm": ("system", "power_budget_dbm", float, False),
    "system.radar_noise_dbm": ("system", "radar_noise_dbm", float, False),
    "system.user_noise_dbm": ("system", "user_noise_dbm", float, False),
    "system.rate_threshold": ("system", "rate_threshold", float, False),
    "system.rician_factor": ("system", "rician_factor", float, False),
    "system.alpha_bs_irs": ("system", "alpha_bs_irs", float, False),
    "system.alpha_irs_user": ("system", "alpha_irs_user", float, False),
    "system.alpha_bs_user": ("system", "alpha_bs_user", float, False),
    "geometry.bs": ("geometry", "bs_position", float, True),
    "geometry.irs": ("geometry", "irs_position", float, True),
    "geometry.user_center": ("geometry", "user_center", float, True),
    "geometry.user_radius": ("geometry", "user_radius", float, False),
    "environment.target_angles": ("environment", "target_angles", float, True),
    "environment.target_strengths": ("environment", "target_strengths", float, True),
    "environment.clutter_angles": ("environment", "clutter_angles", float, True),
    "environment.clutter_strengths": ("environment", "clutter_strengths", float, True),
    "environment.los": ("environment", "los", bool, False),
    "experiment.id": ("experiment", "id", str, False),
    "experiment.grid": ("experiment", "grid", float, True),
    "experiment.schemes": ("experiment", "schemes", str, True),
    "experiment.output_dir": ("experiment", "output_dir", str, False),
    "solver.tol": ("solver", "tol", float, False),
    "solver.max_outer": ("solver", "max_outer", int, False),
    "solver.inner_cap": ("solver", "inner_cap", int, False),
    "solver.n_randomizations": ("solver", "n_randomizations", int, False),
    "seeds": ("top", "seeds", int, True),
}


def _parse_config_text(text: str) -> dict:
    values: dict[str, object] = {}
    for line_no, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {line_no}: expected 'key = value', got {line!r}")
        key, raw_value = (piece.strip() for piece in line.split("=", 1))
        if key not in CONFIG_SCHEMA:
            raise ConfigError(f"line {line_no}: unknown key {key!r}")
        _, _, kind, is_list = CONFIG_SCHEMA[key]
        if is_list:
            values[key] = _parse_list(raw_value, kind, key, line_no)
        else:
            values[key] = _parse_scalar(raw_value, kind, key, line_no)
    return values


def _pair(values, key, default):
    if key in values:
        pair = values[key]
        if len(pair) != 2:
            raise ConfigError(f"key {key!r} expects exactly two coordinates")
        return (float(pair[0]), float(pair[1]))
    return default


def load_config(
    path: str | Path | None,
    profile: str = "desk",
    seed_override: int | None = None,
    out_override: str | None = None,
) -> LoadedConfig:
    """Parse a config file (or None for pure defaults) into run-ready objects."""
    if profile not in PROFILES:
        raise ConfigError(f"unknown profile {profile!r}")
    text = Path(path).read_text(encoding="utf-8") if path is not None else ""
    values = _parse_config_text(text)

    sys_kwargs = dict(PROFILES[profile])
    sys_kwargs.setdefault("snapshot_length", 64)
    for key, (group, field, _, _) in CONFIG_SCHEMA.items():
        if group != "system" or key not in values:
            continue
        if field == "power_budget_dbm":
            sys_kwargs["power_budget"] = dbm_to_watts(values[key])
        elif field == "radar_noise_dbm":
            sys_kwargs["radar_noise"] = dbm_to_watts(values[key])
        elif field == "user_noise_dbm":
            sys_kwargs["_user_noise_dbm"] = values[key]
        elif field == "rate_threshold":
            sys_kwargs["_rate_threshold"] = values[key]
        else:
            sys_kwargs[field] = values[key]
    n_users = sys_kwargs.get("n_users", PROFILES[profile]["n_users"])
    if "_user_noise_dbm" in sys_kwargs:
        sys_kwargs["user_noise"] = (dbm_to_watts(sys_kwargs.pop("_user_noise_dbm")),) * n_users
    if "_rate_threshold" in sys_kwargs:
        sys_kwargs["rate_thresholds"] = (sys_kwargs.pop("_rate_threshold"),) * n_users
    try:
        system = SystemConfig(**sys_kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    geometry = Geometry(
        bs_position=_pair(values, "geometry.bs", (0.0, 0.0)),
        irs_position=_pair(values, "geometry.irs", (50.0, 10.0)),
        user_center=_pair(values, "geometry.user_center", (60.0, 0.0)),
        user_radius=float(values.get("geometry.user_radius", 2.5)),
    )

    target_angles = tuple(values.get("environment.target_angles", (0.0,)))
    target_strengths = tuple(
        values.get("environment.target_strengths", (0.01,) * len(target_angles))
    )
    clutter_angles = tuple(
        values.get(
            "environment.clutter_angles", (-80.0, -50.0, -10.0, 10.0, 50.0, 80.0)
        )
    )
    clutter_strengths = tuple(
        values.get("environment.clutter_strengths", (1.0,) * len(clutter_angles))
    )
    try:
        environment = RadarEnvironment(
            target_angles=target_angles,
            target_strengths=target_strengths,
            clutter_angles=clutter_angles,
            clutter_strengths=clutter_strengths,
            n_irs_elements=system.n_irs_elements,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    experiment_id = str(values.get("experiment.id", "convergence"))
    if experiment_id not in EXPERIMENT_IDS:
        raise ConfigError(f"unknown experiment id {experiment_id!r}")
    grid = tuple(float(g) for g in values.get("experiment.grid", (0.0,)))
    schemes = tuple(values.get("experiment.schemes", DEFAULT_SCHEMES[experiment_id]))
    seeds = tuple(int(s) for s in values.get("seeds", DEFAULT_SEEDS[profile]))
    if seed_override is not None:
        seeds = (int(seed_override),)
    output_dir = str(values.get("experiment.output_dir", "results"))
    if out_override is not None:
        output_dir = out_override

    solver = SolverSettings(
        tol=float(values.get("solver.tol", 1e-8)),
        max_outer=int(values.get("solver.max_outer", 30)),
        inner_cap=int(values.get("solver.inner_cap", 20)),
        n_randomizations=int(values.get("solver.n_randomizations", 1000)),
    )
    spec = ExperimentSpec(
        experiment_id=experiment_id,
        grid=grid,
        seeds=seeds,
        schemes=schemes,
        output_dir=output_dir,
        los_mode=bool(values.get("environment.los", False)),
        solver=solver,
    )

    hash_payload = {
        "profile": profile,
        "values": {k: list(v) if isinstance(v, tuple) else v for k, v in sorted(values.items())},
        "seed_override": seed_override,
    }
    config_hash = hashlib.sha256(
        json.dumps(hash_payload, sort_keys=True).encode("utf-8")
    ).hexdigest()
    return LoadedConfig(
        spec=spec,
        system=system,
        geometry=geometry,
        environment=environment,
        config_hash=config_hash,
    )


def _scenario_for_cell(
    loaded: LoadedConfig, scheme: str, grid_value: float, seed: int
) -> Scenario:
    spec = loaded.spec
    system, environment = loaded.system, loaded.environment
    if spec.experiment_id == "mi_vs_rate":
        system = replace(
            system, rate_thresholds=(float(grid_value),) * system.n_users
        )
    elif spec.experiment_id == "mi_vs_elements":
        system = replace(system, n_irs_elements=int(grid_value))
    elif spec.experiment_id == "mi_vs_clutter":
        environment = environment.with_clutter_count(int(grid_value))
    simplified = spec.experiment_id in SIMPLIFIED_EXPERIMENTS or scheme == "alg1"
    if simplified:
        environment = environment.with_clutter_count(0)
        los_mode = True
    else:
        los_mode = spec.los_mode
    return make_scenario(
        system, loaded.geometry, environment, seed=seed, los_mode=los_mode
    )


def _run_scheme(
    scheme: str, scenario: Scenario, solver: SolverSettings, seed: int
) -> tuple[BeamformingState, RunTrace]:
    if scheme == "alg1":
        return run_alg1(
            scenario,
            Alg1Options(
                max_outer=solver.max_outer, solver_tol=solver.tol, seed=seed
            ),
        )
    options = Alg2Options(
        max_outer=solver.max_outer,
        inner_cap=solver.inner_cap,
        n_randomizations=solver.n_randomizations,
        solver_tol=solver.tol,
        seed=seed,
    )
    if scheme == "alg2":
        return run_alg2(scenario, options)
    if scheme == "cbo":
        return run_cbo(scenario, options)
    if scheme == "so":
        return run_so(scenario, options)
    if scheme == "random":
        return run_random(scenario, options)
    raise ValueError(f"unknown scheme {scheme!r}")


def _cell_rows(
    spec: ExperimentSpec,
    scheme: str,
    seed: int,
    grid_value: float,
    state: BeamformingState,
    trace: RunTrace,
    scenario: Scenario,
) -> list[tuple[int, float, str, str, float]]:
    rows = []
    if spec.experiment_id == "convergence":
        for record in trace.records:
            rows.append((seed, float(record.iteration), scheme, "mi_nats", record.mi_nats))
        return rows
    if spec.experiment_id == "timing":
        cumulative = 0.0
        for record in trace.records:
            cumulative += record.wall_clock_ms
            rows.append(
                (seed, float(record.iteration), scheme, "cumulative_wall_ms", cumulative)
            )
        return rows
    report = evaluate(state, scenario)
    rows.append((seed, grid_value, scheme, "mi_nats", report.mi_nats))
    rows.append((seed, grid_value, scheme, "min_rate", min(report.rates)))
    rows.append((seed, grid_value, scheme, "power", report.power_used))
    return rows


def save_state(
    state: BeamformingState, scenario: Scenario, scheme: str, path: str | Path
) -> None:
    """Persist a converged state with enough context to rebuild its channels."""
    cfg = scenario.config
    payload = {
        "scheme": scheme,
        "seed": scenario.seed,
        "los_mode": scenario.los_mode,
        "blocked_bs_user": scenario.blocked_bs_user,
        "system": {
            "n_bs_antennas": cfg.n_bs_antennas,
            "n_irs_elements": cfg.n_irs_elements,
            "n_users": cfg.n_users,
            "snapshot_length": cfg.snapshot_length,
            "power_budget": cfg.power_budget,
            "radar_noise": cfg.radar_noise,
            "user_noise": list(cfg.user_noise),
            "rate_thresholds": list(cfg.rate_thresholds),
            "rician_factor": cfg.rician_factor,
            "alpha_bs_irs": cfg.alpha_bs_irs,
            "alpha_irs_user": cfg.alpha_irs_user,
            "alpha_bs_user": cfg.alpha_bs_user,
        },
        "geometry": {
            "bs_position": list(scenario.geometry.bs_position),
            "irs_position": list(scenario.geometry.irs_position),
            "user_center": list(scenario.geometry.user_center),
            "user_radius": scenario.geometry.user_radius,
        },
        "environment": {
            "target_angles": list(scenario.environment.target_angles),
            "target_strengths": list(scenario.environment.target_strengths),
            "clutter_angles": list(scenario.environment.clutter_angles),
            "clutter_strengths": list(scenario.environment.clutter_strengths),
        },
        "w_real": np.real(state.w).tolist(),
        "w_imag": np.imag(state.w).tolist(),
        "e_real": np.real(state.e).tolist(),
        "e_imag": np.imag(state.e).tolist(),
    }
    Path(path).write_text(
        json.dumps(payload, sort_keys=True, indent=1) + "\n", encoding="utf-8"
    )


def load_state(path: str | Path) -> tuple[BeamformingState, Scenario, str]:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    sys_d = payload["system"]
    config = SystemConfig(
        n_bs_antennas=sys_d["n_bs_antennas"],
        n_irs_elements=sys_d["n_irs_elements"],
        n_users=sys_d["n_users"],
        snapshot_length=sys_d["snapshot_length"],
        power_budget=sys_d["power_budget"],
        radar_noise=sys_d["radar_noise"],
        user_noise=tuple(sys_d["user_noise"]),
        rate_thresholds=tuple(sys_d["rate_thresholds"]),
        rician_factor=sys_d["rician_factor"],
        alpha_bs_irs=sys_d["alpha_bs_irs"],
        alpha_irs_user=sys_d["alpha_irs_user"],
        alpha_bs_user=sys_d["alpha_bs_user"],
    )
    geo_d = payload["geometry"]
    geometry = Geometry(
        bs_position=tuple(geo_d["bs_position"]),
        irs_position=tuple(geo_d["irs_position"]),
        user_center=tuple(geo_d["user_center"]),
        user_radius=geo_d["user_radius"],
    )
    env_d = payload["environment"]
    environment = RadarEnvironment(
        target_angles=tuple(env_d["target_angles"]),
        target_strengths=tuple(env_d["target_strengths"]),
        clutter_angles=tuple(env_d["clutter_angles"]),
        clutter_strengths=tuple(env_d["clutter_strengths"]),
        n_irs_elements=config.n_irs_elements,
    )
    scenario = make_scenario(
        config,
        geometry,
        environment,
        seed=payload["seed"],
        los_mode=payload["los_mode"],
        blocked_bs_user=payload["blocked_bs_user"],
    )
    w = np.asarray(payload["w_real"]) + 1j * np.asarray(payload["w_imag"])
    e = np.asarray(payload["e_real"]) + 1j * np.asarray(payload["e_imag"])
    k = config.n_users
    state = BeamformingState(w_c=w[:, :k], w_r=w[:, k:], e=e)
    return state, scenario, payload["scheme"]


def emit_beampattern(
    state: BeamformingState,
    channels,
    grid: np.ndarray | None,
    path: str | Path,
) -> Path:
    """Write the angle/gain CSV with the exact documented header."""
    grid = BEAMPATTERN_GRID if grid is None else np.asarray(grid, dtype=float)
    gains = beampattern(state, channels, grid)
    lines = ["angle_deg,gain_db"]
    for angle, gain in zip(grid, gains):
        lines.append(f"{angle:.10e},{gain:.10e}")
    path = Path(path)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
    return path


def run_experiment(loaded: LoadedConfig) -> dict:
    """Execute all seed x grid x scheme cells; write CSV plus JSON manifest.

    Failed cells are recorded in the manifest's error list and skipped in the
    CSV; the run continues.
    """
    spec = loaded.spec
    out_dir = Path(spec.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    started = time.perf_counter()
    rows: list[tuple[int, float, str, str, float]] = []
    errors: list[dict] = []
    extra_outputs: list[str] = []

    for seed in spec.seeds:
        for grid_value in spec.grid:
            for scheme in spec.schemes:
                try:
                    scenario = _scenario_for_cell(loaded, scheme, grid_value, seed)
                    state, trace = _run_scheme(scheme, scenario, spec.solver, seed)
                    rows.extend(
                        _cell_rows(spec, scheme, seed, grid_value, state, trace, scenario)
                    )
                    if spec.experiment_id == "beampattern":
                        bp_path = out_dir / f"beampattern_{scheme}_seed{seed}.csv"
                        emit_beampattern(state, scenario.channels, None, bp_path)
                        state_path = out_dir / f"state_{scheme}_seed{seed}.json"
                        save_state(state, scenario, scheme, state_path)
                        extra_outputs.extend([str(bp_path), str(state_path)])
                except Exception as exc:  # noqa: BLE001 - partial-failure policy
                    errors.append(
                        {
                            "seed": seed,
                            "grid_value": grid_value,
                            "scheme": scheme,
                            "error": f"{type(exc).__name__}: {exc}",
                        }
                    )

    csv_path = out_dir / f"{spec.experiment_id}.csv"
    lines = ["seed,grid_value,scheme,metric,value"]
    for seed, grid_value, scheme, metric, value in rows:
        lines.append(f"{seed},{grid_value:.10e},{scheme},{metric},{value:.10e}")
    csv_path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")

    schema = sorted({(scheme, metric) for _, _, scheme, metric, _ in rows})
    manifest = {
        "experiment": spec.experiment_id,
        "sweep": SWEEP_NAMES[spec.experiment_id],
        "grid": list(spec.grid),
        "seeds": list(spec.seeds),
        "schemes": list(spec.schemes),
        "schema": [{"scheme": s, "metric": m} for s, m in schema],
        "config_hash": loaded.config_hash,
        "versions": {
            "package": __version__,
            "python": sys.version.split()[0],
            "numpy": np.__version__,
        },
        "wall_clock_s": time.perf_counter() - started,
        "errors": errors,
        "outputs": [str(csv_path), *extra_outputs],
    }
    manifest_path = out_dir / f"{spec.experiment_id}_manifest.json"
    manifest_path.write_text(
        json.dumps(manifest, indent=1, sort_keys=True) + "\n", encoding="utf-8"
    )
    manifest["manifest_path"] = str(manifest_path)
    return manifest


def _self_checks() -> list[tuple[str, bool, str]]:
    """Quick oracle cross-checks runnable from an installed package."""
    from .alg2 import mi_general
    from .metrics import sensing_mi, simplified_mi_scalar, simplified_mi_to_nats
    from .scene import steering
    from .tensorlin import commutation_matrix, kron, vec

    results = []
    rng = np.random.default_rng(0)

    a = rng.standard_normal((3, 2)) + 1j * rng.standard_normal((3, 2))
    b = rng.standard_normal((2, 4)) + 1j * rng.standard_normal((2, 4))
    x = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    ok = np.allclose(kron(b.T, a) @ vec(x), vec(a @ x @ b))
    results.append(("kron-vec identity", ok, "vec(AXB) == (B^T kron A) vec(X)"))

    k_mat = commutation_matrix(3, 4)
    m = rng.standard_normal((3, 4))
    ok = np.allclose(k_mat @ vec(m), vec(m.T))
    results.append(("commutation identity", ok, "K vec(M) == vec(M^T)"))

    ok = np.allclose(np.abs(steering(17.0, 9)), 1.0)
    results.append(("steering modulus", ok, "|steering| == 1"))

    cfg = SystemConfig(
        n_bs_antennas=3, n_irs_elements=6, n_users=2, snapshot_length=8,
        rate_thresholds=(1.0, 1.0),
    )
    env = RadarEnvironment(
        target_angles=(0.0,), target_strengths=(0.01,),
        clutter_angles=(40.0,), clutter_strengths=(0.01,), n_irs_elements=6,
    )
    scenario = make_scenario(cfg, Geometry(), env, seed=0, los_mode=False)
    w = rng.standard_normal((3, 5)) + 1j * rng.standard_normal((3, 5))
    state = BeamformingState(
        w_c=w[:, :2], w_r=w[:, 2:],
        e=np.exp(1j * rng.uniform(0, 2 * np.pi, 6)),
    )
    direct = sensing_mi(state, scenario.channels, scenario.environment, cfg)
    woodbury = mi_general(state, scenario.channels, scenario.environment, cfg)
    ok = abs(direct - woodbury) <= 1e-8 * max(abs(direct), 1.0)
    results.append(("dual-path MI", ok, f"direct={direct:.6e} lemma={woodbury:.6e}"))

    los = make_scenario(
        cfg, Geometry(), env.with_clutter_count(0), seed=0, los_mode=True
    )
    scalar = simplified_mi_scalar(state, los.channels, los.environment, cfg)
    closed = simplified_mi_to_nats(scalar, los.channels.xi, cfg)
    full = sensing_mi(state, los.channels, los.environment, cfg)
    ok = abs(closed - full) <= 1e-8 * max(abs(full), 1.0)
    results.append(("simplified MI", ok, f"closed={closed:.6e} full={full:.6e}"))
    return results


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="irs-isac", description="IRS-aided ISAC experiment harness"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run an experiment from a config file")
    run_p.add_argument("config", help="path to the key-value config file")
    run_p.add_argument("--profile", choices=sorted(PROFILES), default="desk")
    run_p.add_argument("--seed", type=int, default=None, help="single-seed override")
    run_p.add_argument("--out", default=None, help="output directory override")

    bp_p = sub.add_parser("beampattern", help="emit a beampattern CSV from a state file")
    bp_p.add_argument("state_file", help="JSON state file written by a run")
    bp_p.add_argument("--out", default=None, help="output CSV path")

    sub.add_parser("validate", help="run the built-in oracle cross-checks")

    args = parser.parse_args(argv)
    if args.command == "run":
        try:
            loaded = load_config(
                args.config,
                profile=args.profile,
                seed_override=args.seed,
                out_override=args.out,
            )
        except (ConfigError, OSError) as exc:
            print(f"config error: {exc}", file=sys.stderr)
            return 2
        manifest = run_experiment(loaded)
        print(json.dumps({k: manifest[k] for k in ("experiment", "outputs", "errors")}, indent=1))
        return 0 if not manifest["errors"] else 1
    if args.command == "beampattern":
        state, scenario, scheme = load_state(args.state_file)
        out = args.out or str(Path(args.state_file).with_suffix(".beampattern.csv"))
        path = emit_beampattern(state, scenario.channels, None, out)
        print(str(path))
        return 0
    if args.command == "validate":
        failures = 0
        for name, ok, detail in _self_checks():
            print(f"{'ok' if ok else 'FAIL'} {name}: {detail}")
            failures += 0 if ok else 1
        return 0 if failures == 0 else 1
    return 2


if __name__ == "__main__":
    raise SystemExit(main())
