"""Qubit linear algebra: Pauli strings, tensor products, partial transposes and
a Jacobi eigensolver for small Hermitian matrices.

Matrices are plain ``numpy`` complex arrays.  Pauli strings are written as
words over ``"IXYZ"`` with qubit 1 leftmost; their canonical integer index is
the base-4 number obtained with the digit map I=0, X=1, Y=2, Z=3 (qubit 1 is
the most significant digit).  Every file format in the package relies on this
ordering.
"""
from __future__ import annotations

import itertools
from functools import lru_cache, reduce

import numba
import numpy as np

HERMITIAN_TOL = 1e-12
PSD_TOL = -1e-10
TRACE_TOL = 1e-12
IMAG_TOL = 1e-10
EIG_HERMITIAN_TOL = 1e-10

PAULI_LETTERS = "IXYZ"

I2 = np.eye(2, dtype=complex)
X2 = np.array([[0, 1], [1, 0]], dtype=complex)
Y2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z2 = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = {"I": I2, "X": X2, "Y": Y2, "Z": Z2}


class StateError(ValueError):
    """Raised when a matrix is not a valid density matrix."""


def n_qubits_of(mat) -> int:
    dim = np.shape(mat)[0]
    n = int(round(np.log2(dim)))
    if 2**n != dim:
        raise ValueError(f"dimension {dim} is not a power of two")
    return n


# --------------------------------------------------------------------------
# Pauli strings
# --------------------------------------------------------------------------

def pauli_index(letters: str) -> int:
    """Canonical index of a Pauli word, e.g. ``pauli_index("XZ") == 7``."""
    idx = 0
    for ch in letters.upper():
        idx = 4 * idx + PAULI_LETTERS.index(ch)
    return idx


def pauli_letters(index: int, n: int) -> str:
    """Inverse of :func:`pauli_index` for an ``n``-qubit register."""
    if not 0 <= index < 4**n:
        raise ValueError(f"Pauli index {index} out of range for {n} qubits")
    out = []
    for _ in range(n):
        index, d = divmod(index, 4)
        out.append(PAULI_LETTERS[d])
    return "".join(reversed(out))


def pauli_labels(n: int) -> list[str]:
    """All ``4**n`` Pauli words in canonical order."""
    return ["".join(p) for p in itertools.product(PAULI_LETTERS, repeat=n)]


def tensor_product(factors) -> np.ndarray:
    """Kronecker product of square matrices, first factor most significant."""
    factors = list(factors)
    if not factors:
        raise ValueError("no factors")
    for f in factors:
        f = np.asarray(f)
        if f.ndim != 2 or f.shape[0] != f.shape[1]:
            raise ValueError("non-square factor")
    return reduce(np.kron, [np.asarray(f, dtype=complex) for f in factors])


def pauli_matrix(letters: str) -> np.ndarray:
    if not letters:
        raise ValueError("empty Pauli string")
    return tensor_product(PAULIS[ch] for ch in letters.upper())


@lru_cache(maxsize=None)
def _pauli_stack(n: int) -> np.ndarray:
    mats = np.stack([pauli_matrix(p) for p in pauli_labels(n)])
    mats.setflags(write=False)
    return mats


def pauli_basis(n: int) -> np.ndarray:
    """Read-only array of shape ``(4**n, 2**n, 2**n)`` in canonical order."""
    return _pauli_stack(n)


# --------------------------------------------------------------------------
# states and expectations
# --------------------------------------------------------------------------

def is_hermitian(m, tol: float = HERMITIAN_TOL) -> bool:
    m = np.asarray(m)
    return m.ndim == 2 and m.shape[0] == m.shape[1] and np.max(np.abs(m - m.conj().T), initial=0.0) <= tol


def check_density_matrix(rho) -> np.ndarray:
    """Validate Hermiticity, unit trace and positivity; return ``rho`` as array."""
    rho = np.asarray(rho, dtype=complex)
    n_qubits_of(rho)
    if not is_hermitian(rho):
        raise StateError("density matrix is not Hermitian")
    tr = np.trace(rho)
    if abs(tr - 1) > TRACE_TOL * rho.shape[0] or abs(tr.imag) > TRACE_TOL:
        raise StateError(f"trace {tr.real:.15g} differs from 1")
    lo = hermitian_eigenvalues(rho)[0]
    if lo < PSD_TOL:
        raise StateError(f"negative eigenvalue {lo:.3e}")
    return rho


def projector(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


def expectation(op, rho) -> float:
    """``Tr(op @ rho)`` for Hermitian ``op``; errors on a non-real result."""
    op = np.asarray(op)
    rho = np.asarray(rho)
    if op.shape != rho.shape:
        raise ValueError(f"dimension mismatch {op.shape} vs {rho.shape}")
    val = np.einsum("ij,ji->", op, rho)
    if abs(val.imag) >= IMAG_TOL:
        raise ValueError(f"non-Hermitian expectation (imaginary part {val.imag:.3e})")
    return float(val.real)


def partial_transpose(rho, subsystems) -> np.ndarray:
    """Transpose the tensor indices of the given qubits (1-based)."""
    rho = np.asarray(rho)
    n = n_qubits_of(rho)
    subsystems = set(subsystems)
    for q in subsystems:
        if not 1 <= q <= n:
            raise ValueError(f"qubit index {q} out of range 1..{n}")
    t = rho.reshape([2] * (2 * n))
    axes = list(range(2 * n))
    for q in subsystems:
        axes[q - 1], axes[q - 1 + n] = axes[q - 1 + n], axes[q - 1]
    return t.transpose(axes).reshape(rho.shape)


def bipartitions(n: int) -> list[frozenset[int]]:
    """One side of every bipartition of ``n`` qubits, always excluding qubit 1.

    Transposing the complement gives the full transpose of the partial
    transpose, which has the same spectrum, so each cut is listed once.
    """
    rest = range(2, n + 1)
    cuts = []
    for r in range(1, n):
        for combo in itertools.combinations(rest, r):
            cuts.append(frozenset(combo))
    return cuts


def min_pt_eigenvalue(rho, subsystems) -> float:
    return hermitian_eigenvalues(partial_transpose(rho, subsystems))[0]


def is_ppt(rho, subsystems) -> bool:
    return min_pt_eigenvalue(rho, subsystems) >= PSD_TOL


def is_ppt_all(rho) -> bool:
    """PPT with respect to every bipartition."""
    return all(is_ppt(rho, cut) for cut in bipartitions(n_qubits_of(rho)))


def npt_cut(rho):
    """First bipartition with a negative partial transpose, or ``None``."""
    for cut in bipartitions(n_qubits_of(rho)):
        if not is_ppt(rho, cut):
            return cut
    return None


# --------------------------------------------------------------------------
# Jacobi eigensolver
# --------------------------------------------------------------------------

@numba.njit(cache=True)
def _jacobi_hermitian(a, tol, max_sweeps):
    n = a.shape[0]
    v = np.eye(n, dtype=np.complex128)
    scale = 0.0
    for i in range(n):
        for j in range(n):
            scale += abs(a[i, j]) ** 2
    scale = np.sqrt(scale)
    if scale == 0.0:
        return np.zeros(n), v, 0
    for sweep in range(max_sweeps):
        off = 0.0
        for p in range(n):
            for q in range(p + 1, n):
                off += abs(a[p, q]) ** 2
        if np.sqrt(2.0 * off) <= tol * scale:
            return np.real(np.diag(a)).copy(), v, sweep
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag <= 1e-300:
                    continue
                ph = apq / mag
                # rephase column/row q so that a[p, q] becomes real and positive
                for k in range(n):
                    a[k, q] *= np.conj(ph)
                    v[k, q] *= np.conj(ph)
                for k in range(n):
                    a[q, k] *= ph
                app = a[p, p].real
                aqq = a[q, q].real
                tau = (aqq - app) / (2.0 * mag)
                if tau >= 0.0:
                    t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = c * akp - s * akq
                    a[k, q] = s * akp + c * akq
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = c * apk - s * aqk
                    a[q, k] = s * apk + c * aqk
                a[p, q] = 0.0
                a[q, p] = 0.0
                for k in range(n):
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = c * vkp - s * vkq
                    v[k, q] = s * vkp + c * vkq
    return np.real(np.diag(a)).copy(), v, -1


def hermitian_eigh(m, tol: float = 1e-14, max_sweeps: int = 60):
    """Eigen-decomposition of a Hermitian matrix by cyclic complex Jacobi sweeps.

    Returns ``(values, vectors)`` with values ascending and eigenvectors as
    columns.  Raises ``ValueError`` if ``m`` is not Hermitian to 1e-10.
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("non-square matrix")
    if not is_hermitian(m, EIG_HERMITIAN_TOL):
        raise ValueError("matrix is not Hermitian")
    a = 0.5 * (m + m.conj().T)
    vals, vecs, sweeps = _jacobi_hermitian(np.ascontiguousarray(a), tol, max_sweeps)
    if sweeps < 0:
        raise RuntimeError("Jacobi iteration did not converge")
    order = np.argsort(vals, kind="stable")
    return vals[order], vecs[:, order]


def hermitian_eigenvalues(m) -> np.ndarray:
    return hermitian_eigh(m)[0]
