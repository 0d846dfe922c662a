#!/usr/bin/env python3
"""Minimal end-to-end run: optimize one small scenario and print the result."""


from irs_isac.alg1 import Alg1Options, run_alg1
from irs_isac.alg2 import Alg2Options, run_alg2
from irs_isac.metrics import evaluate
from irs_isac.scene import Geometry, RadarEnvironment, SystemConfig, make_scenario


def report(label, state, trace, scenario):
    summary = evaluate(state, scenario)
    rates = ", ".join(f"{r:.2f}" for r in summary.rates)
    print(
        f"{label}: MI {summary.mi_nats:.4f} nats | rates [{rates}] bits "
        f"| power {summary.power_used:.3f} W | {len(trace.records)} outer iterations "
        f"({trace.exit_reason}, {trace.total_wall_ms / 1e3:.1f} s)"
    )


def main() -> None:
    config = SystemConfig(n_bs_antennas=4, n_irs_elements=16, n_users=2)
    target = RadarEnvironment(
        target_angles=(0.0,), target_strengths=(0.01,), n_irs_elements=16
    )

    los = make_scenario(config, Geometry(), target, seed=0, los_mode=True)
    state, trace = run_alg1(los, Alg1Options(seed=0))
    report("pure-LoS pipeline ", state, trace, los)

    cluttered = RadarEnvironment(
        target_angles=(0.0,),
        target_strengths=(0.01,),
        clutter_angles=(-50.0, 40.0),
        clutter_strengths=(1.0, 1.0),
        n_irs_elements=16,
    )
    rician = make_scenario(config, Geometry(), cluttered, seed=0, los_mode=False)
    state, trace = run_alg2(rician, Alg2Options(seed=0, max_outer=10))
    report("generalized pipeline", state, trace, rician)


if __name__ == "__main__":
    main()
