"""Objective-evaluation tests, including brute-force and Monte-Carlo oracles."""

import math

import numpy as np
import pytest

from irs_isac.metrics import (
    BeamformingState,
    all_rates,
    beampattern,
    comm_rate,
    effective_channels,
    evaluate,
    modulus_residual,
    reflection_matrix,
    sensing_mi,
    sensing_mi_monte_carlo,
    simplified_mi_scalar,
    simplified_mi_to_nats,
)
from irs_isac.scene import (
    ChannelSet,
    Geometry,
    RadarEnvironment,
    SystemConfig,
    los_channel,
    make_scenario,
    steering,
)
from irs_isac.tensorlin import kron


def crandn(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def tiny_config(**over):
    base = dict(
        n_bs_antennas=2,
        n_irs_elements=3,
        n_users=1,
        snapshot_length=4,
        power_budget=1.0,
        radar_noise=1.0,
        user_noise=(1.0,),
        rate_thresholds=(1.0,),
    )
    base.update(over)
    return SystemConfig(**base)


def random_channels(config, rng, los=False):
    if los:
        h_bi, theta_b, theta_i = los_channel(Geometry(), config)
        xi = np.linalg.svd(h_bi, compute_uv=False)[0] / math.sqrt(
            config.n_irs_elements * config.n_bs_antennas
        )
    else:
        h_bi = crandn(rng, config.n_irs_elements, config.n_bs_antennas)
        theta_b = theta_i = 0.0
        xi = 1.0
    return ChannelSet(
        h_bi=h_bi,
        h_iu=crandn(rng, config.n_users, config.n_irs_elements),
        h_bu=crandn(rng, config.n_users, config.n_bs_antennas),
        theta_b=theta_b,
        theta_i=theta_i,
        xi=float(xi),
        los_mode=los,
    )


def random_state(config, rng, power=None):
    n, k, m = config.n_bs_antennas, config.n_users, config.n_irs_elements
    w = crandn(rng, n, k + n)
    if power is not None:
        w *= math.sqrt(power) / np.linalg.norm(w)
    return BeamformingState(
        w_c=w[:, :k],
        w_r=w[:, k:],
        e=np.exp(1j * rng.uniform(0, 2 * np.pi, m)),
    )


def small_env(m, clutter=True):
    return RadarEnvironment(
        target_angles=(-20.0, 25.0),
        target_strengths=(0.8, 1.3),
        clutter_angles=(50.0,) if clutter else (),
        clutter_strengths=(0.6,) if clutter else (),
        n_irs_elements=m,
    )


def brute_force_mi(state, channels, environment, config):
    """Full-size log-det evaluation without any factor tricks."""
    n = config.n_bs_antennas
    eta = config.snapshot_length / config.radar_noise
    e_phys = np.diag(np.conj(state.e))
    a = kron(channels.h_bi.T @ e_phys.T, channels.h_bi.conj().T @ e_phys.conj().T)
    w_tilde = kron(np.eye(n), state.w.conj().T)
    r_rc = environment.r_target.matrix + environment.r_clutter.matrix
    r_c = environment.r_clutter.matrix

    def term(r):
        mid = w_tilde @ a @ r @ a.conj().T @ w_tilde.conj().T
        return np.linalg.slogdet(np.eye(mid.shape[0]) + eta * mid)[1]

    return term(r_rc) - term(r_c)


class TestSensingMi:
    def test_zero_beamformer(self):
        cfg = tiny_config()
        rng = np.random.default_rng(0)
        ch = random_channels(cfg, rng)
        st = random_state(cfg, rng)
        zero = st.with_w(np.zeros_like(st.w_c), np.zeros_like(st.w_r))
        assert sensing_mi(zero, ch, small_env(3), cfg) == 0.0

    def test_brute_force_oracle(self):
        cfg = tiny_config()
        env = small_env(3)
        rng = np.random.default_rng(1)
        for _ in range(20):
            ch = random_channels(cfg, rng)
            st = random_state(cfg, rng)
            fast = sensing_mi(st, ch, env, cfg)
            slow = brute_force_mi(st, ch, env, cfg)
            assert fast == pytest.approx(slow, rel=1e-8, abs=1e-12)

    def test_nonnegative(self):
        cfg = tiny_config()
        env = small_env(3)
        rng = np.random.default_rng(2)
        for _ in range(30):
            val = sensing_mi(
                random_state(cfg, rng), random_channels(cfg, rng), env, cfg
            )
            assert val >= -1e-12

    def test_unitary_invariance_of_sensing_columns(self):
        cfg = tiny_config()
        env = small_env(3)
        rng = np.random.default_rng(3)
        ch = random_channels(cfg, rng)
        st = random_state(cfg, rng)
        q, _ = np.linalg.qr(crandn(rng, cfg.n_bs_antennas, cfg.n_bs_antennas))
        rotated = st.with_w(st.w_c, st.w_r @ q)
        assert sensing_mi(rotated, ch, env, cfg) == pytest.approx(
            sensing_mi(st, ch, env, cfg), rel=1e-10
        )


class TestSimplified:
    def test_zero_beamformer(self):
        cfg = tiny_config()
        rng = np.random.default_rng(4)
        ch = random_channels(cfg, rng, los=True)
        st = random_state(cfg, rng)
        zero = st.with_w(np.zeros_like(st.w_c), np.zeros_like(st.w_r))
        assert simplified_mi_scalar(zero, ch, small_env(3, clutter=False), cfg) == 0.0

    def test_matches_sensing_mi(self):
        cfg = tiny_config()
        env = small_env(3, clutter=False)
        rng = np.random.default_rng(5)
        ch = random_channels(cfg, rng, los=True)
        for _ in range(10):
            st = random_state(cfg, rng)
            s = simplified_mi_scalar(st, ch, env, cfg)
            direct = sensing_mi(st, ch, env, cfg)
            assert simplified_mi_to_nats(s, ch.xi, cfg) == pytest.approx(
                direct, rel=1e-8
            )

    def test_bs_gain_reduction_identity(self):
        # a^H Wt^H Wt a with Wt = I kron W^H equals N * a^H W W^H a
        cfg = tiny_config()
        rng = np.random.default_rng(6)
        st = random_state(cfg, rng)
        n = cfg.n_bs_antennas
        a = steering(11.3, n)
        a_bar = kron(a.conj(), a)
        w_tilde = kron(np.eye(n), st.w.conj().T)
        lhs = np.linalg.norm(w_tilde @ a_bar) ** 2
        rhs = n * np.real(a.conj() @ st.w @ st.w.conj().T @ a)
        assert lhs == pytest.approx(rhs, rel=1e-10)

    def test_global_phase_invariance(self):
        cfg = tiny_config()
        env = small_env(3, clutter=False)
        rng = np.random.default_rng(7)
        ch = random_channels(cfg, rng, los=True)
        st = random_state(cfg, rng)
        rotated = st.with_e(st.e * np.exp(1j * 0.83))
        assert simplified_mi_scalar(rotated, ch, env, cfg) == pytest.approx(
            simplified_mi_scalar(st, ch, env, cfg), rel=1e-10
        )

    def test_rejects_full_rank_channel(self):
        cfg = tiny_config()
        rng = np.random.default_rng(8)
        ch = random_channels(cfg, rng, los=False)
        with pytest.raises(ValueError):
            simplified_mi_scalar(
                random_state(cfg, rng), ch, small_env(3, clutter=False), cfg
            )


class TestCommRate:
    def test_zero_beamformer(self):
        cfg = tiny_config()
        rng = np.random.default_rng(9)
        ch = random_channels(cfg, rng)
        st = random_state(cfg, rng)
        zero = st.with_w(np.zeros_like(st.w_c), st.w_r)
        assert comm_rate(0, zero, ch, cfg) == 0.0

    def test_matched_filter_closed_form(self):
        cfg = tiny_config(user_noise=(0.5,))
        rng = np.random.default_rng(10)
        ch = random_channels(cfg, rng)
        e = np.exp(1j * rng.uniform(0, 2 * np.pi, 3))
        h = effective_channels(ch, e)[0].conj()
        p = 2.0
        w_c = (math.sqrt(p) * h / np.linalg.norm(h)).reshape(-1, 1)
        st = BeamformingState(w_c=w_c, w_r=np.zeros((2, 2)), e=e)
        expected = math.log2(1.0 + p * np.linalg.norm(h) ** 2 / 0.5)
        assert comm_rate(0, st, ch, cfg) == pytest.approx(expected, rel=1e-12)

    def test_sensing_power_never_helps(self):
        cfg = tiny_config(n_users=2, user_noise=(1.0, 1.0), rate_thresholds=(1.0, 1.0))
        rng = np.random.default_rng(11)
        ch = random_channels(cfg, rng)
        st = random_state(cfg, rng)
        quiet = st.with_w(st.w_c, np.zeros_like(st.w_r))
        for k in range(2):
            assert comm_rate(k, st, ch, cfg) <= comm_rate(k, quiet, ch, cfg) + 1e-12

    def test_scalar_reimplementation(self):
        cfg = tiny_config(n_users=2, user_noise=(0.3, 0.9), rate_thresholds=(1.0, 1.0))
        rng = np.random.default_rng(12)
        ch = random_channels(cfg, rng)
        st = random_state(cfg, rng)
        for k in range(2):
            h = np.conj(ch.h_bu[k]) + (
                np.conj(ch.h_iu[k]) @ reflection_matrix(st.e) @ ch.h_bi
            )
            num = abs(h @ st.w_c[:, k]) ** 2
            den = cfg.user_noise[k]
            for i in range(2):
                if i != k:
                    den += abs(h @ st.w_c[:, i]) ** 2
            for j in range(st.w_r.shape[1]):
                den += abs(h @ st.w_r[:, j]) ** 2
            assert comm_rate(k, st, ch, cfg) == pytest.approx(
                math.log2(1 + num / den), rel=1e-12
            )


class TestBeampattern:
    def test_zero_beamformer_floor(self):
        cfg = tiny_config()
        rng = np.random.default_rng(13)
        ch = random_channels(cfg, rng)
        st = random_state(cfg, rng)
        zero = st.with_w(np.zeros_like(st.w_c), np.zeros_like(st.w_r))
        out = beampattern(zero, ch, np.linspace(-90, 90, 19))
        np.testing.assert_array_equal(out, np.full(19, -100.0))

    def test_peak_normalized(self):
        cfg = tiny_config()
        rng = np.random.default_rng(14)
        out = beampattern(
            random_state(cfg, rng),
            random_channels(cfg, rng),
            np.linspace(-90, 90, 181),
        )
        assert out.max() == pytest.approx(0.0, abs=1e-12)
        assert np.all(out <= 1e-12)

    def test_empty_grid_rejected(self):
        cfg = tiny_config()
        rng = np.random.default_rng(15)
        with pytest.raises(ValueError):
            beampattern(random_state(cfg, rng), random_channels(cfg, rng), [])


class TestMonteCarlo:
    def test_zero_beamformer(self):
        cfg = tiny_config()
        rng = np.random.default_rng(16)
        ch = random_channels(cfg, rng)
        st = random_state(cfg, rng)
        zero = st.with_w(np.zeros_like(st.w_c), np.zeros_like(st.w_r))
        assert sensing_mi_monte_carlo(zero, ch, small_env(3), cfg, 3, seed=0) == 0.0

    def test_large_block_agreement(self):
        cfg = tiny_config(snapshot_length=512)
        env = small_env(3)
        rng = np.random.default_rng(17)
        ch = random_channels(cfg, rng)
        st = random_state(cfg, rng, power=1.0)
        exact = sensing_mi(st, ch, env, cfg)
        estimate = sensing_mi_monte_carlo(st, ch, env, cfg, 40, seed=1)
        assert estimate == pytest.approx(exact, rel=0.05)

    def test_gap_shrinks_with_block_length(self):
        env = small_env(3)
        rng = np.random.default_rng(18)
        gaps = []
        for length in (64, 256, 1024):
            cfg = tiny_config(snapshot_length=length)
            ch = random_channels(cfg, np.random.default_rng(19))
            st = random_state(cfg, np.random.default_rng(20), power=1.0)
            exact = sensing_mi(st, ch, env, cfg)
            est = sensing_mi_monte_carlo(st, ch, env, cfg, 60, seed=2)
            gaps.append(abs(est - exact) / exact)
        assert gaps[2] < gaps[0]


class TestReporting:
    def test_evaluate_bundle(self):
        cfg = tiny_config()
        env = RadarEnvironment(
            target_angles=(0.0,), target_strengths=(0.01,), n_irs_elements=3
        )
        sc = make_scenario(
            SystemConfig(
                n_bs_antennas=2,
                n_irs_elements=3,
                n_users=1,
                snapshot_length=4,
                power_budget=1.0,
                radar_noise=1.0,
                user_noise=(1.0,),
                rate_thresholds=(1.0,),
            ),
            Geometry(),
            env,
            seed=0,
        )
        rng = np.random.default_rng(21)
        st = random_state(cfg, rng, power=0.9)
        rep = evaluate(st, sc)
        assert rep.mi_nats >= 0
        assert rep.power_used == pytest.approx(0.9)
        assert rep.modulus_residual == pytest.approx(modulus_residual(st.e))
        assert rep.rates == all_rates(st, sc.channels, sc.config)
