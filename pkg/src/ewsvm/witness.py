"""Witness operators built from SVM hyperplanes, and their validation.

A witness is stored by its real Pauli coefficients ``c`` (canonical order) so
that ``Tr(W rho) = c . x(rho)`` with ``x`` the feature vector.  The dense
matrix is derived on demand.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from . import features, qcore, states, svm
from .states import ProductState
from .svm import SvmModel, TrainConfig

log = logging.getLogger(__name__)

EPS_VALID = 1e-6
DEFAULT_RESTARTS = 256
SWEEP_TOL = 1e-12
MAX_SWEEPS = 2000


class NotAWitness(RuntimeError):
    pass


@dataclass
class WitnessOperator:
    n_qubits: int
    coefficients: np.ndarray
    normalization: str = "unit-trace"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.coefficients = np.asarray(self.coefficients, dtype=float)
        if self.coefficients.shape != (4**self.n_qubits,):
            raise ValueError("coefficient vector has the wrong length")

    @classmethod
    def from_matrix(cls, m, normalization: str = "as-given", **meta) -> "WitnessOperator":
        """Pauli coefficients ``Tr(P_t W) / 2^N``; the Hermitian part is used."""
        m = np.asarray(m, dtype=complex)
        n = qcore.n_qubits_of(m)
        h = 0.5 * (m + m.conj().T)
        coeffs = np.einsum("tij,ji->t", qcore.pauli_basis(n), h).real / 2**n
        return cls(n, coeffs, normalization, dict(meta))

    @property
    def matrix(self) -> np.ndarray:
        return features.operator_from_coefficients(self.coefficients)

    @property
    def trace(self) -> float:
        return float(2**self.n_qubits * self.coefficients[0])

    def value(self, rho) -> float:
        """``Tr(W rho)`` through the coefficient/feature dot product."""
        return float(self.coefficients @ features.feature_vector(rho))

    def shifted(self, delta: float) -> "WitnessOperator":
        c = self.coefficients.copy()
        c[0] += delta
        return WitnessOperator(self.n_qubits, c, self.normalization, dict(self.meta))

    def normalized(self) -> "WitnessOperator":
        """Rescale to unit trace; left alone (tagged) if the trace is not positive."""
        if self.coefficients[0] <= 0:
            log.warning("witness trace %.3g is not positive; leaving it unnormalized", self.trace)
            return WitnessOperator(self.n_qubits, self.coefficients.copy(), "unnormalized", dict(self.meta))
        return WitnessOperator(
            self.n_qubits, self.coefficients / (2**self.n_qubits * self.coefficients[0]),
            "unit-trace", dict(self.meta),
        )


def assemble_witness(model: SvmModel) -> WitnessOperator:
    """Fold the bias into the identity coefficient and normalize to unit trace."""
    n = features.n_qubits_of_features(model.w)
    c = model.w.copy()
    c[0] += model.b
    return WitnessOperator(n, c, "raw", {"source": "svm"}).normalized()


# --------------------------------------------------------------------------
# minimization over product states
# --------------------------------------------------------------------------

def _as_matrix(W) -> np.ndarray:
    return W.matrix if isinstance(W, WitnessOperator) else np.asarray(W, dtype=complex)


def product_expectation(W, state: ProductState) -> float:
    m = _as_matrix(W)
    v = state.vector()
    return float(np.real(v.conj() @ m @ v))


def _kron_rows(q):
    """Row-wise Kronecker product of ``q`` with shape (R, k, 2) -> (R, 2**k)."""
    out = np.ones((q.shape[0], 1), dtype=complex)
    for j in range(q.shape[1]):
        out = (out[:, :, None] * q[:, j, None, :]).reshape(q.shape[0], -1)
    return out


def _min_eigvec_2x2(M):
    """Lowest eigenpair of a stack of 2x2 Hermitian matrices, in closed form."""
    p = M[:, 0, 0].real
    q = M[:, 1, 1].real
    z = M[:, 0, 1]
    lam = 0.5 * (p + q) - np.sqrt(0.25 * (p - q) ** 2 + np.abs(z) ** 2)
    v1 = np.stack([z, lam - p], axis=1)
    v2 = np.stack([lam - q, np.conj(z)], axis=1)
    n1 = np.linalg.norm(v1, axis=1)
    n2 = np.linalg.norm(v2, axis=1)
    v = np.where((n1 >= n2)[:, None], v1, v2)
    nv = np.maximum(n1, n2)
    # M proportional to the identity: every vector is optimal, take |0>
    flat = nv < 1e-300
    v[flat] = np.array([1.0, 0.0])
    nv[flat] = 1.0
    return lam, v / nv[:, None]


def coordinate_descent(W, q0, tol: float = SWEEP_TOL, max_sweeps: int = MAX_SWEEPS):
    """Exact single-qubit updates on a batch of product states.

    ``q0`` has shape (R, N, 2).  Fixing every qubit but one turns
    ``<nu|W|nu>`` into a 2x2 Rayleigh quotient, minimized by its lowest
    eigenvector; sweeps repeat until no restart improves by more than ``tol``.
    Returns the final qubit vectors and values.
    """
    m = _as_matrix(W)
    n = qcore.n_qubits_of(m)
    q = np.array(q0, dtype=complex)
    q /= np.linalg.norm(q, axis=2, keepdims=True)
    T = 0.5 * (m + m.conj().T)
    T = T.reshape([2] * (2 * n))
    per_qubit = []
    for k in range(n):
        rest = [j for j in range(n) if j != k]
        perm = [k] + rest + [n + k] + [n + j for j in rest]
        per_qubit.append(T.transpose(perm).reshape(2, 2 ** (n - 1), 2, 2 ** (n - 1)))
    values = np.real(np.einsum("ri,ij,rj->r", _kron_rows(q).conj(), m, _kron_rows(q)))
    for _ in range(max_sweeps):
        prev = values
        for k in range(n):
            rest = [j for j in range(n) if j != k]
            v = _kron_rows(q[:, rest, :])
            M = np.einsum("ri,aibj,rj->rab", v.conj(), per_qubit[k], v)
            values, q[:, k, :] = _min_eigvec_2x2(M)
        if np.max(prev - values) <= tol:
            break
    return q, values


def _start_states(n: int, restarts: int, seed) -> np.ndarray:
    # seed may be an int or a tuple of ints; restart r gets its own stream
    key = list(seed) if isinstance(seed, (tuple, list)) else [seed]
    q0 = np.empty((restarts, n, 2), dtype=complex)
    for r in range(restarts):
        q0[r] = states.random_product_state(n, np.random.default_rng(key + [r])).qubits()
    return q0


def product_minima(W, restarts: int = DEFAULT_RESTARTS, seed: int = 0):
    """Local minima of ``<nu|W|nu>`` from ``restarts`` random starts.

    Returns ``(values, qubits)`` sorted by value (ties keep restart order).
    """
    if restarts < 1:
        raise ValueError("need at least one restart")
    m = _as_matrix(W)
    n = qcore.n_qubits_of(m)
    q, values = coordinate_descent(m, _start_states(n, restarts, seed))
    order = np.argsort(values, kind="stable")
    return values[order], q[order]


def min_over_product_states(W, restarts: int = DEFAULT_RESTARTS, seed: int = 0):
    """Best ``(value, ProductState)`` found by multi-start coordinate descent.

    The value is attained by the returned state, so it is an upper bound on
    the true minimum over product states.
    """
    values, q = product_minima(W, restarts, seed)
    best = ProductState.from_qubits(q[0])
    return float(product_expectation(W, best)), best


# --------------------------------------------------------------------------
# training against product states
# --------------------------------------------------------------------------

@dataclass
class CutResult:
    model: SvmModel
    witness: WitnessOperator
    rounds: int
    cuts: int
    converged: bool
    history: list = field(default_factory=list)


def train_with_product_cuts(X, y, config: TrainConfig | None = None, max_rounds: int = 100,
                            restarts: int = 128, seed: int = 0, tol: float = 1e-9) -> CutResult:
    """Retrain while the witness is negative on some product state.

    Each round minimizes the current witness over product states and adds the
    distinct negative minima to the separable class as pure product samples.
    This closes the gap between a sparse separable sample and the full set
    of product states, which matters when the entangled class sits right at
    the separable boundary.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    history = []
    cuts = 0
    for r in range(max_rounds + 1):
        model = svm.train(X, y, config)
        W = assemble_witness(model)
        values, q = product_minima(W, restarts, (seed, r))
        neg = values < -tol
        history.append({"round": r, "min_product_value": float(values[0]), "new_cuts": int(neg.sum())})
        if not neg.any() or r == max_rounds:
            break
        vecs = _kron_rows(q[neg])
        keep = [0]
        for i in range(1, len(vecs)):
            if np.max(np.abs(vecs[keep].conj() @ vecs[i]) ** 2) < 1 - 1e-6:
                keep.append(i)
        vecs = vecs[keep]
        rhos = np.einsum("ri,rj->rij", vecs, vecs.conj())
        X = np.vstack([X, features.feature_matrix(rhos)])
        y = np.concatenate([y, np.ones(len(vecs))])
        cuts += len(vecs)
    converged = not neg.any()
    if not converged:
        log.warning("product cuts did not converge in %d rounds (min %.3g)", max_rounds, values[0])
    model.meta.update({"cut_rounds": r, "cuts": cuts})
    return CutResult(model, W, r, cuts, converged, history)


# --------------------------------------------------------------------------
# calibration and verification
# --------------------------------------------------------------------------

def calibrate(W: WitnessOperator, restarts: int = DEFAULT_RESTARTS, seed: int = 0,
              tighten: bool = True) -> WitnessOperator:
    """Shift the identity coefficient so that the product-state minimum is zero.

    A negative minimum is always removed.  With ``tighten`` a positive minimum
    is removed too, which moves the hyperplane onto the separable set.  The
    result is renormalized to unit trace and must keep a negative eigenvalue.
    """
    out = W
    shift_total = 0.0
    for _ in range(5):
        m, _state = min_over_product_states(out, restarts, seed)
        if m >= -EPS_VALID and not (tighten and m > 0):
            break
        out = out.shifted(-m)
        shift_total -= m
        if abs(m) <= 1e-14:
            break
    out = out.normalized()
    m, _state = min_over_product_states(out, restarts, seed)
    if m < -EPS_VALID:
        raise NotAWitness(f"calibration failed: product-state minimum {m:.3e}")
    lowest = qcore.hermitian_eigenvalues(out.matrix)[0]
    out.meta.update({"calibration_shift": shift_total, "min_product_value": m, "min_eigenvalue": lowest})
    if lowest >= 0:
        raise NotAWitness(
            f"no witness separates this data: calibrated operator is positive (min eigenvalue {lowest:.3e})"
        )
    return out


@dataclass
class WitnessReport:
    valid: bool
    min_product_value: float
    min_product_state: ProductState
    min_eigenvalue: float
    detected_state: np.ndarray
    detected_value: float
    detected_npt: bool
    reason: str = ""

    @property
    def verdict(self) -> str:
        return "valid witness" if self.valid else f"not a witness: {self.reason}"

    def fields(self) -> dict:
        return {
            "verdict": "valid" if self.valid else "not-a-witness",
            "reason": self.reason,
            "min_product_value": self.min_product_value,
            "min_eigenvalue": self.min_eigenvalue,
            "detected_value": self.detected_value,
            "detected_npt": self.detected_npt,
        }


def verify_witness(W, restarts: int = DEFAULT_RESTARTS, seed: int = 0) -> WitnessReport:
    """Check nonnegativity on product states and the existence of a detected state.

    The detected state is the projector onto the lowest eigenvector.
    """
    m = _as_matrix(W)
    mp, state = min_over_product_states(m, restarts, seed)
    vals, vecs = qcore.hermitian_eigh(0.5 * (m + m.conj().T))
    psi = vecs[:, 0]
    rho = qcore.projector(psi)
    detected = float(np.real(psi.conj() @ m @ psi))
    npt = qcore.npt_cut(rho) is not None
    reasons = []
    if mp < -EPS_VALID:
        reasons.append(f"negative on a product state ({mp:.3e})")
    if vals[0] >= 0:
        reasons.append(f"no negative eigenvalue (min {vals[0]:.3e})")
    return WitnessReport(not reasons, mp, state, float(vals[0]), rho, detected, npt, "; ".join(reasons))


# --------------------------------------------------------------------------
# detection thresholds on Werner-type families
# --------------------------------------------------------------------------

@dataclass
class ThresholdReport:
    family: str
    slope: float
    intercept: float
    residual: float

    @property
    def detects(self) -> bool:
        return self.slope < 0 and self.p_star < 1

    @property
    def p_star(self) -> float:
        if self.slope == 0:
            return math.inf
        return -self.intercept / self.slope

    @property
    def verdict(self) -> str:
        if self.slope >= 0:
            return "family not detected"
        if self.p_star >= 1:
            return "family not detected in [0, 1]"
        return f"detects p > {self.p_star:.6g}"

    def fields(self) -> dict:
        return {"family": self.family, "slope": self.slope, "intercept": self.intercept,
                "p_star": self.p_star, "residual": self.residual, "verdict": self.verdict}


def werner_values(W, base, ps) -> np.ndarray:
    m = _as_matrix(W)
    return np.array([np.real(np.trace(m @ states.werner(base, p))) for p in ps])


def detection_threshold(W, base, family: str = "werner", n_check: int = 20) -> ThresholdReport:
    """Affine fit of ``Tr(W rho_p)`` from p = 0, 1/2, 1 and its zero crossing.

    The fit is checked against ``n_check`` interior points.
    """
    v0, vh, v1 = werner_values(W, base, [0.0, 0.5, 1.0])
    slope = v1 - v0
    if abs(slope) < 1e-12:
        slope = 0.0  # rounding noise on a flat line
    intercept = v0
    residual = abs(vh - (intercept + 0.5 * slope))
    ps = np.linspace(0, 1, n_check + 2)[1:-1]
    residual = max(residual, float(np.max(np.abs(werner_values(W, base, ps) - (intercept + slope * ps)))))
    return ThresholdReport(family, float(slope), float(intercept), float(residual))
