"""Optimality (tangent product states) and non-decomposability (PPT hits) certificates."""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field

import numpy as np

from . import features, qcore, states
from .states import EdgeStateParams, ProductState
from .witness import WitnessOperator, _as_matrix, product_minima

log = logging.getLogger(__name__)

EPS_TAN = 1e-6
FIDELITY_GAP = 1e-6
RANK_TOL = 1e-8
HIT_TOL = -1e-8
DEFAULT_TANGENT_RESTARTS = 1024
NAMED_EDGE_POINT = (0.3525, 0.3196, 0.81642)

OPTIMAL = "OPTIMAL"
NONDECOMPOSABLE = "NONDECOMPOSABLE"
INCONCLUSIVE = "INCONCLUSIVE"


@dataclass
class TangentSet:
    states: list[ProductState]
    values: np.ndarray
    span_rank: int
    target_count: int
    restarts: int
    short: bool = False  # fewer than target_count states were found

    def table(self) -> list[dict]:
        rows = []
        for s, v in zip(self.states, self.values):
            rows.append({"theta": s.thetas.tolist(), "alpha": s.alphas.tolist(), "value": float(v)})
        return rows


def span_rank(vectors, tol: float = RANK_TOL) -> int:
    """Number of singular values above ``tol`` of the stacked amplitude vectors."""
    if len(vectors) == 0:
        return 0
    s = np.linalg.svd(np.asarray(vectors, dtype=complex), compute_uv=False)
    return int(np.sum(s > tol))


def _distinct(vectors) -> list[int]:
    kept: list[int] = []
    for i, v in enumerate(vectors):
        if kept:
            fid = np.abs(np.asarray(vectors)[kept].conj() @ v) ** 2
            if np.max(fid) >= 1 - FIDELITY_GAP:
                continue
        kept.append(i)
    return kept


def tangent_states(W, target_count: int | None = None, restarts: int = DEFAULT_TANGENT_RESTARTS,
                   seed: int = 0, eps: float = EPS_TAN) -> TangentSet:
    """Distinct local minima of ``<nu|W|nu>`` whose value is within ``eps`` of zero."""
    m = _as_matrix(W)
    n = qcore.n_qubits_of(m)
    target = 2**n if target_count is None else target_count
    values, q = product_minima(m, restarts, seed)
    close = np.abs(values) < eps
    cand = [ProductState.from_qubits(qq) for qq in q[close]]
    vecs = [s.vector() for s in cand]
    keep = _distinct(vecs)
    found = [cand[i] for i in keep]
    vals = np.array([values[close][i] for i in keep])
    rank = span_rank([vecs[i] for i in keep])
    short = len(found) < target
    if short:
        log.warning("only %d tangent states found (wanted %d)", len(found), target)
    return TangentSet(found, vals, rank, target, restarts, short)


@dataclass
class Verdict:
    verdict: str
    detail: dict = field(default_factory=dict)

    def __str__(self):
        extra = ", ".join(f"{k}={v}" for k, v in self.detail.items())
        return f"{self.verdict} ({extra})" if extra else self.verdict


def optimality_verdict(ts: TangentSet, n_qubits: int) -> Verdict:
    """OPTIMAL when the tangent states span the whole register, INCONCLUSIVE otherwise."""
    full = 2**n_qubits
    return Verdict(OPTIMAL if ts.span_rank == full else INCONCLUSIVE,
                   {"rank": ts.span_rank, "dimension": full})


# --------------------------------------------------------------------------
# PPT entangled edge states
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class PptesHit:
    params: EdgeStateParams
    trace_value: float


def default_pptes_grid(points: int = 20, lo: float = 0.05, hi: float = 0.95) -> list[tuple[float, float, float]]:
    axis = np.linspace(lo, hi, points)
    grid = [tuple(float(x) for x in p) for p in itertools.product(axis, repeat=3)]
    grid.append(NAMED_EDGE_POINT)
    return grid


def pptes_scan(W, grid=None, seed: int = 0) -> list[PptesHit]:
    """Edge states on ``grid`` that ``W`` detects (trace below -1e-8), in grid order.

    The grid is deterministic, so ``seed`` only exists for interface symmetry
    with the other certificates.  Each state is checked PPT on every single
    qubit transpose, and every trace is computed twice: as a coefficient/feature
    dot product and as a dense trace.
    """
    if grid is None:
        grid = default_pptes_grid()
    Wop = W if isinstance(W, WitnessOperator) else WitnessOperator.from_matrix(W)
    if Wop.n_qubits != 3:
        raise ValueError("PPT edge states live on three qubits")
    dense = Wop.matrix
    hits = []
    for abc in grid:
        params = EdgeStateParams(*abc)
        rho = states.edge_ppt_state(params)
        for q in (1, 2, 3):
            if not qcore.is_ppt(rho, {q}):
                raise RuntimeError(f"edge state {abc} is not PPT on qubit {q}")
        t1 = float(Wop.coefficients @ features.feature_vector(rho))
        t2 = qcore.expectation(dense, rho)
        if abs(t1 - t2) > 1e-12:
            raise RuntimeError(f"trace paths disagree at {abc}: {t1} vs {t2}")
        if t1 < HIT_TOL:
            hits.append(PptesHit(params, t1))
    return hits


def nondecomposability_verdict(hits) -> Verdict:
    hits = list(hits)
    if not hits:
        return Verdict(INCONCLUSIVE, {"hits": 0})
    best = min(h.trace_value for h in hits)
    return Verdict(NONDECOMPOSABLE, {"hits": len(hits), "min_trace": best})


@dataclass
class EdgeCurve:
    axis: str
    xs: np.ndarray
    traces: np.ndarray
    coefficients: tuple[float, float, float]  # (alpha, beta, gamma) of n*Tr = alpha + beta/x + gamma*x
    residual: float


def edge_trace_curve(W, axis: str = "a", fixed=(0.3196, 0.81642), xs=None) -> EdgeCurve:
    """``Tr(W rho)`` along one edge parameter with the other two held at ``fixed``.

    The normalized trace ``n * Tr`` is exactly ``alpha + beta/x + gamma*x``;
    the three coefficients come from an exact fit at three points and are
    checked at ten more.
    """
    if axis not in ("a", "b", "c"):
        raise ValueError("axis must be 'a', 'b' or 'c'")
    m = _as_matrix(W)
    if qcore.n_qubits_of(m) != 3:
        raise ValueError("edge curves need a three-qubit witness")
    k = "abc".index(axis)
    fixed = list(fixed)

    def params_at(x):
        vals = fixed[:k] + [x] + fixed[k:]
        return EdgeStateParams(*vals)

    def scaled_trace(x):
        p = params_at(x)
        return p.norm * qcore.expectation(m, states.edge_ppt_state(p))

    fit_x = np.array([0.2, 0.5, 0.8])
    A = np.column_stack([np.ones(3), 1 / fit_x, fit_x])
    coef = np.linalg.solve(A, [scaled_trace(x) for x in fit_x])
    check_x = np.linspace(0.05, 0.95, 10)
    pred = coef[0] + coef[1] / check_x + coef[2] * check_x
    resid = float(np.max(np.abs(pred - [scaled_trace(x) for x in check_x])))
    if resid >= 1e-9:
        raise RuntimeError(f"trace not rational-affine (residual {resid:.3e})")
    if xs is None:
        xs = np.linspace(0.05, 0.95, 19)
    xs = np.asarray(xs, dtype=float)
    traces = np.array([qcore.expectation(m, states.edge_ppt_state(params_at(x))) for x in xs])
    return EdgeCurve(axis, xs, traces, tuple(float(c) for c in coef), resid)
