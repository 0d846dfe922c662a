"""Dense complex linear-algebra kernels shared by the optimization pipelines.

Vectorization is column-major everywhere; the vec-Kronecker identity
(C^T kron A) vec(B) = vec(A B C) only holds under a single consistent
convention, so no caller is allowed to pick its own.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

HERMITIAN_ASYMMETRY_TOL = 1e-10
PSD_EIGENVALUE_TOL = 1e-9
RANK_CUTOFF_REL = 1e-10


class IndefiniteMatrixError(ValueError):
    """Raised when a matrix expected to be PSD has significant negative spectrum."""


class NotPositiveDefiniteError(ValueError):
    """Raised when a Cholesky-based routine receives a non-HPD matrix."""


@dataclass(frozen=True)
class HermitianEVD:
    """Spectral decomposition A = V diag(w) V^H with w real ascending."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


@dataclass(frozen=True)
class PsdFactor:
    """Tall rank-revealing factor F with F F^H equal to the factored PSD matrix."""

    factor: np.ndarray

    @property
    def rank(self) -> int:
        return self.factor.shape[1]

    @property
    def matrix(self) -> np.ndarray:
        return self.factor @ self.factor.conj().T


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product a kron b."""
    return np.kron(np.asarray(a), np.asarray(b))


def vec(a: np.ndarray) -> np.ndarray:
    """Column-stacking vectorization."""
    return np.asarray(a).reshape(-1, order="F")


def unvec(v: np.ndarray, rows: int, cols: int) -> np.ndarray:
    """Inverse of :func:`vec` for a rows x cols matrix."""
    return np.asarray(v).reshape((rows, cols), order="F")


def commutation_matrix(p: int, q: int) -> np.ndarray:
    """The pq x pq permutation K with K vec(A) = vec(A^T) for every p x q A."""
    if p < 1 or q < 1:
        raise ValueError("commutation matrix requires p, q >= 1")
    k = np.zeros((p * q, p * q))
    # vec(A) index j*p + i maps to vec(A^T) index i*q + j
    i, j = np.meshgrid(np.arange(p), np.arange(q), indexing="ij")
    k[(i * q + j).ravel(), (j * p + i).ravel()] = 1.0
    return k


def build_phi(n_antennas: int, k_tilde: int) -> np.ndarray:
    """Lifting matrix Phi with vec(I_n kron W^H) = Phi conj(vec(W)).

    W is n_antennas x k_tilde.  Phi is a 0/1 selection matrix of size
    (n^3 k_tilde) x (n k_tilde): stacked blocks (C_i kron I)^T applied after
    the commutation matrix K_{n, k_tilde}, where C_i = unvec of the i-th
    column of I_{n^2}.
    """
    n, kt = n_antennas, k_tilde
    if n < 1 or kt < 1:
        raise ValueError("build_phi requires n_antennas, k_tilde >= 1")
    k_comm = commutation_matrix(n, kt)
    eye_kt = np.eye(kt)
    blocks = []
    for i in range(n * n):
        c_i = unvec(np.eye(n * n)[:, i], n, n)
        blocks.append(np.kron(c_i, eye_kt).T)
    return np.vstack(blocks) @ k_comm


def _symmetrize(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("expected a square matrix")
    if not np.all(np.isfinite(a.view(float))):
        raise ValueError("matrix has non-finite entries")
    return 0.5 * (a + a.conj().T)


def herm_evd(a: np.ndarray) -> HermitianEVD:
    """Full spectral decomposition of a (nearly) Hermitian matrix.

    The input is symmetrized before decomposition; eigenvalues ascend.
    """
    a_sym = _symmetrize(a)
    w, v = np.linalg.eigh(a_sym)
    return HermitianEVD(eigenvalues=w, eigenvectors=v)

def psd_shift(a: np.ndarray) -> tuple[np.ndarray, float]:
    """Return (A - lambda_min(A) I, lambda_min(A)); the first output is PSD."""
    a_sym = _symmetrize(a)
    lam_min = float(np.linalg.eigvalsh(a_sym)[0])
    return a_sym - lam_min * np.eye(a_sym.shape[0]), lam_min


def psd_factor(r: np.ndarray) -> PsdFactor:
    """Rank-revealing factor F (columns for eigenvalues > cutoff) with F F^H = r.

    Input must be PSD within tolerance: eigenvalues >= -1e-9 * ||r||.
    """
    evd = herm_evd(r)
    w, v = evd.eigenvalues, evd.eigenvectors
    scale = float(np.max(np.abs(w))) if w.size else 0.0
    if w.size and w[0] < -PSD_EIGENVALUE_TOL * max(scale, 1.0):
        raise IndefiniteMatrixError(
            f"matrix is indefinite beyond tolerance: lambda_min={w[0]:.3e}"
        )
    cutoff = RANK_CUTOFF_REL * scale
    keep = w > cutoff
    factor = v[:, keep] * np.sqrt(np.maximum(w[keep], 0.0))
    return PsdFactor(factor=factor)


def logdet_hpd(a: np.ndarray) -> float:
    """Natural-log determinant of an HPD matrix via Cholesky."""
    a_sym = _symmetrize(a)
    try:
        chol = np.linalg.cholesky(a_sym)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefiniteError("Cholesky failed: input not HPD") from exc
    return float(2.0 * np.sum(np.log(np.real(np.diag(chol)))))
