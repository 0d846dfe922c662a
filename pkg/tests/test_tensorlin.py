"""Identity and oracle tests for the dense linear-algebra kernels."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from irs_isac.tensorlin import (
    HermitianEVD,
    IndefiniteMatrixError,
    NotPositiveDefiniteError,
    build_phi,
    commutation_matrix,
    herm_evd,
    kron,
    logdet_hpd,
    psd_factor,
    psd_shift,
    unvec,
    vec,
)


def crandn(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


class TestKron:
    def test_identity_case(self):
        np.testing.assert_array_equal(kron(np.eye(2), np.eye(3)), np.eye(6))

    def test_hand_oracle(self):
        out = kron(np.array([1.0, 2.0]), np.array([3.0, 4.0]))
        np.testing.assert_array_equal(out, [3.0, 4.0, 6.0, 8.0])

    def test_mixed_product(self):
        rng = np.random.default_rng(0)
        for _ in range(100):
            a, b, c, d = (crandn(rng, 2, 2) for _ in range(4))
            lhs = kron(a @ b, c @ d)
            rhs = kron(a, c) @ kron(b, d)
            assert np.max(np.abs(lhs - rhs)) < 1e-12


class TestVec:
    def test_column_stacking(self):
        a = np.array([[1.0, 2.0], [3.0, 4.0]])
        np.testing.assert_array_equal(vec(a), [1.0, 3.0, 2.0, 4.0])
        np.testing.assert_array_equal(unvec(vec(a), 2, 2), a)

    def test_vector_passthrough(self):
        v = np.array([1.0 + 2j, 3.0])
        np.testing.assert_array_equal(vec(v.reshape(-1, 1)), v)

    def test_vec_kronecker_identity(self):
        rng = np.random.default_rng(1)
        for _ in range(100):
            a, b, c = (crandn(rng, 2, 2) for _ in range(3))
            lhs = kron(c.T, a) @ vec(b)
            rhs = vec(a @ b @ c)
            assert np.max(np.abs(lhs - rhs)) < 1e-12


class TestCommutation:
    def test_trivial_split(self):
        np.testing.assert_array_equal(commutation_matrix(1, 4), np.eye(4))

    def test_hand_oracle_2x2(self):
        a = np.array([[1.0, 2.0], [3.0, 4.0]])
        np.testing.assert_array_equal(commutation_matrix(2, 2) @ vec(a), vec(a.T))

    def test_permutation_structure(self):
        k = commutation_matrix(3, 5)
        np.testing.assert_array_equal(k.sum(axis=0), np.ones(15))
        np.testing.assert_array_equal(k.sum(axis=1), np.ones(15))
        assert set(np.unique(k)) <= {0.0, 1.0}

    @given(p=st.integers(1, 5), q=st.integers(1, 5), seed=st.integers(0, 10**6))
    @settings(max_examples=100, deadline=None)
    def test_defining_identity(self, p, q, seed):
        rng = np.random.default_rng(seed)
        a = crandn(rng, p, q)
        lhs = commutation_matrix(p, q) @ vec(a)
        assert np.max(np.abs(lhs - vec(a.T))) < 1e-12


class TestBuildPhi:
    @pytest.mark.parametrize("n,kt", [(1, 2), (2, 3), (4, 7)])
    def test_defining_identity(self, n, kt):
        phi = build_phi(n, kt)
        assert phi.shape == (n**3 * kt, n * kt)
        rng = np.random.default_rng(42)
        for _ in range(100):
            w = crandn(rng, n, kt)
            lhs = vec(np.kron(np.eye(n), w.conj().T))
            rhs = phi @ np.conj(vec(w))
            assert np.max(np.abs(lhs - rhs)) < 1e-12

    def test_n1_direct(self):
        rng = np.random.default_rng(3)
        w = crandn(rng, 1, 3)
        lhs = vec(w.conj().T)
        rhs = build_phi(1, 3) @ np.conj(vec(w))
        np.testing.assert_allclose(lhs, rhs, atol=1e-14)

    def test_selection_structure(self):
        phi = build_phi(2, 3)
        assert set(np.unique(phi)) <= {0.0, 1.0}
        # each row selects at most one source entry
        assert np.all(phi.sum(axis=1) <= 1.0)


class TestHermEvd:
    def test_identity(self):
        evd = herm_evd(np.eye(3))
        assert isinstance(evd, HermitianEVD)
        np.testing.assert_allclose(evd.eigenvalues, [1.0, 1.0, 1.0])

    def test_indefinite_diag(self):
        evd = herm_evd(np.diag([-1.0, 2.0]))
        np.testing.assert_allclose(evd.eigenvalues, [-1.0, 2.0])

    def test_reconstruction(self):
        rng = np.random.default_rng(4)
        g = crandn(rng, 8, 8)
        a = g + g.conj().T
        evd = herm_evd(a)
        recon = evd.eigenvectors @ np.diag(evd.eigenvalues) @ evd.eigenvectors.conj().T
        assert np.linalg.norm(recon - a) <= 1e-10 * np.linalg.norm(a)
        vhv = evd.eigenvectors.conj().T @ evd.eigenvectors
        assert np.linalg.norm(vhv - np.eye(8)) < 1e-10

    def test_nonfinite_rejected(self):
        with pytest.raises(ValueError):
            herm_evd(np.array([[np.nan, 0.0], [0.0, 1.0]]))


class TestPsdShift:
    def test_hand_oracle(self):
        shifted, lam = psd_shift(np.diag([-2.0, 3.0]))
        np.testing.assert_allclose(shifted, np.diag([0.0, 5.0]), atol=1e-12)
        assert lam == pytest.approx(-2.0)

    def test_psd_input(self):
        a = np.diag([1.0, 4.0])
        shifted, lam = psd_shift(a)
        assert lam == pytest.approx(1.0)
        assert np.linalg.eigvalsh(shifted)[0] >= -1e-10 * np.linalg.norm(a)

    @given(seed=st.integers(0, 10**6))
    @settings(max_examples=50, deadline=None)
    def test_quadratic_form_identity(self, seed):
        rng = np.random.default_rng(seed)
        g = crandn(rng, 4, 4)
        a = g + g.conj().T
        shifted, lam = psd_shift(a)
        e = np.exp(1j * rng.uniform(0, 2 * np.pi, 4))
        lhs = np.real(e.conj() @ a @ e)
        rhs = np.real(e.conj() @ shifted @ e) + lam * 4
        assert abs(lhs - rhs) < 1e-9 * max(1.0, abs(lhs))


class TestPsdFactor:
    def test_identity(self):
        f = psd_factor(np.eye(3))
        assert f.rank == 3
        np.testing.assert_allclose(f.matrix, np.eye(3), atol=1e-12)

    def test_rank_one(self):
        rng = np.random.default_rng(5)
        u = crandn(rng, 6)
        f = psd_factor(np.outer(u, u.conj()))
        assert f.rank == 1
        np.testing.assert_allclose(
            f.matrix, np.outer(u, u.conj()), atol=1e-10 * np.linalg.norm(u) ** 2
        )

    def test_low_rank_reconstruction(self):
        rng = np.random.default_rng(6)
        g = crandn(rng, 9, 3)
        r = g @ g.conj().T
        f = psd_factor(r)
        assert f.rank == 3
        assert np.linalg.norm(f.matrix - r) <= 1e-10 * np.linalg.norm(r)

    def test_indefinite_rejected(self):
        with pytest.raises(IndefiniteMatrixError):
            psd_factor(np.diag([1.0, -1.0]))


class TestLogdet:
    def test_identity(self):
        assert logdet_hpd(np.eye(5)) == pytest.approx(0.0)

    def test_diag_exponentials(self):
        assert logdet_hpd(np.diag([np.e, np.e**2])) == pytest.approx(3.0)

    def test_sylvester_identity(self):
        rng = np.random.default_rng(7)
        for _ in range(100):
            a = crandn(rng, 4, 6)
            lhs = np.linalg.slogdet(np.eye(4) + a @ a.conj().T)[1]
            rhs = logdet_hpd(np.eye(6) + a.conj().T @ a)
            assert abs(lhs - rhs) < 1e-9 * max(1.0, abs(lhs))

    def test_matches_eigenvalue_sum(self):
        rng = np.random.default_rng(8)
        g = crandn(rng, 6, 6)
        a = g @ g.conj().T + np.eye(6)
        evd = herm_evd(a)
        assert logdet_hpd(a) == pytest.approx(
            float(np.sum(np.log(evd.eigenvalues))), rel=1e-9
        )

    def test_non_pd_rejected(self):
        with pytest.raises(NotPositiveDefiniteError):
            logdet_hpd(np.diag([1.0, 0.0]))
