"""Local Pauli expectation features and a PCA projection for plotting."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import qcore
from .qcore import IMAG_TOL, StateError


def feature_vector(rho) -> np.ndarray:
    """Expectations of all ``4**N`` Pauli strings, canonical order."""
    rho = np.asarray(rho, dtype=complex)
    n = qcore.n_qubits_of(rho)
    vals = np.einsum("tij,ji->t", qcore.pauli_basis(n), rho)
    if np.max(np.abs(vals.imag)) >= IMAG_TOL:
        raise ValueError("non-Hermitian expectation")
    return vals.real.copy()


def feature_matrix(rhos) -> np.ndarray:
    """Stack of feature vectors, one row per state."""
    rhos = np.asarray(rhos, dtype=complex)
    if rhos.ndim == 2:
        rhos = rhos[None]
    n = qcore.n_qubits_of(rhos[0])
    vals = np.einsum("tij,mji->mt", qcore.pauli_basis(n), rhos)
    if vals.size and np.max(np.abs(vals.imag)) >= IMAG_TOL:
        raise ValueError("non-Hermitian expectation")
    return vals.real.copy()


def n_qubits_of_features(f) -> int:
    size = np.shape(f)[-1]
    n = int(round(np.log(size) / np.log(4)))
    if 4**n != size:
        raise ValueError(f"feature length {size} is not a power of four")
    return n


def operator_from_coefficients(coeffs) -> np.ndarray:
    """``sum_t coeffs[t] * P_t``."""
    coeffs = np.asarray(coeffs, dtype=float)
    n = n_qubits_of_features(coeffs)
    return np.tensordot(coeffs, qcore.pauli_basis(n), axes=1)


def reconstruct_state(f) -> np.ndarray:
    """Inverse of :func:`feature_vector`: ``2**-N sum_t f[t] P_t``."""
    f = np.asarray(f, dtype=float)
    n = n_qubits_of_features(f)
    rho = operator_from_coefficients(f) / 2**n
    try:
        return qcore.check_density_matrix(rho)
    except StateError as exc:
        raise StateError(f"not a state: {exc}") from None


@dataclass
class PcaProjection:
    means: np.ndarray
    components: np.ndarray  # (k, d), orthonormal rows
    explained_variance: np.ndarray
    total_variance: float

    def variance_share(self) -> np.ndarray:
        if self.total_variance == 0:
            return np.zeros_like(self.explained_variance)
        return self.explained_variance / self.total_variance


def pca_fit(samples, k: int = 3) -> PcaProjection:
    """Top-``k`` principal axes of the sample covariance (1/(m-1) normalization)."""
    x = np.asarray(samples, dtype=float)
    m, d = x.shape
    if k > d:
        raise ValueError(f"k={k} exceeds feature dimension {d}")
    if m < k + 1:
        raise ValueError(f"need at least {k + 1} samples for {k} components")
    means = x.mean(axis=0)
    centered = x - means
    cov = centered.T @ centered / (m - 1)
    vals, vecs = qcore.hermitian_eigh(cov)
    vals = vals[::-1]
    vecs = vecs[:, ::-1].real
    # fix the sign of each axis so that its largest-magnitude entry is positive
    pivots = np.argmax(np.abs(vecs), axis=0)
    vecs = vecs * np.sign(vecs[pivots, np.arange(d)])
    vals = np.clip(vals, 0.0, None)
    return PcaProjection(means, vecs[:, :k].T.copy(), vals[:k], float(vals.sum()))


def pca_transform(proj: PcaProjection, f) -> np.ndarray:
    f = np.asarray(f, dtype=float)
    if f.shape[-1] != proj.means.shape[0]:
        raise ValueError("dimension mismatch")
    return (f - proj.means) @ proj.components.T
