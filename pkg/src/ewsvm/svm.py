"""Primal soft-margin linear SVM written from scratch.

The decision value is ``w.x + b``; positive means separable (+1).  Two
solvers minimize the same primal objective

    1/2 |w|^2 + C * sum_i max(0, 1 - y_i (w.x_i + b)):

* ``"subgradient"``: full-batch subgradient descent with a decaying step
  ``eta_t = eta_0 / (1 + t / T0)``, keeping the best iterate seen;
* ``"interior-point"``: a Mehrotra predictor-corrector method on the primal
  quadratic program with slack variables, accurate to ~1e-10.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

log = logging.getLogger(__name__)

SOLVERS = ("subgradient", "interior-point")


class DegenerateDataset(ValueError):
    pass


class SvmDivergence(RuntimeError):
    pass


@dataclass
class SvmModel:
    w: np.ndarray
    b: float
    C: float
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.w = np.asarray(self.w, dtype=float)
        self.b = float(self.b)
        if self.C <= 0:
            raise ValueError("C must be positive")
        if not (np.all(np.isfinite(self.w)) and np.isfinite(self.b)):
            raise ValueError("non-finite model parameters")

    @property
    def dim(self) -> int:
        return self.w.shape[0]


@dataclass
class TrainConfig:
    C: float = 10.0
    lr: float = 0.1
    decay_epochs: float = 100.0
    epochs: int = 2000
    seed: int = 0
    tol: float = 1e-9
    patience: int = 50
    solver: str = "interior-point"
    ipm_tol: float = 1e-11
    ipm_max_iter: int = 200

    def __post_init__(self):
        if self.C <= 0 or self.lr <= 0 or self.decay_epochs <= 0:
            raise ValueError("C, lr and decay_epochs must be positive")
        if self.epochs < 1 or self.patience < 1:
            raise ValueError("epochs and patience must be positive")
        if self.solver not in SOLVERS:
            raise ValueError(f"unknown solver {self.solver!r}")


def _as_data(X, y):
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or y.shape != (X.shape[0],):
        raise ValueError("X must be (m, d) and y must be (m,)")
    return X, y


def margins(w, b, X, y) -> np.ndarray:
    return y * (X @ w + b)


def hinge_objective(model: SvmModel, X, y) -> float:
    X, y = _as_data(X, y)
    if X.shape[1] != model.dim:
        raise ValueError("dimension mismatch")
    return _objective(model.w, model.b, model.C, X, y)


def _objective(w, b, C, X, y) -> float:
    hinge = np.maximum(0.0, 1.0 - margins(w, b, X, y))
    return 0.5 * float(w @ w) + C * float(hinge.sum())


def hinge_subgradient(model: SvmModel, X, y) -> tuple[np.ndarray, float]:
    """Subgradient of :func:`hinge_objective`; samples on the margin count as active."""
    X, y = _as_data(X, y)
    return _subgradient(model.w, model.b, model.C, X, y)


def _subgradient(w, b, C, X, y):
    active = margins(w, b, X, y) <= 1.0
    ya = y[active]
    gw = w - C * (ya @ X[active])
    gb = -C * float(ya.sum())
    return gw, gb


def predict(model: SvmModel, f) -> tuple[int, float]:
    """``(label, decision value)``; label is +1 when the value is >= 0."""
    f = np.asarray(f, dtype=float)
    if f.shape != model.w.shape:
        raise ValueError("dimension mismatch")
    value = float(model.w @ f + model.b)
    return (1 if value >= 0 else -1), value


def decision_values(model: SvmModel, X) -> np.ndarray:
    return np.asarray(X, dtype=float) @ model.w + model.b


def accuracy(model: SvmModel, X, y) -> float:
    labels = np.where(decision_values(model, X) >= 0, 1.0, -1.0)
    return float(np.mean(labels == np.asarray(y)))


def _canonical_order(X, y) -> np.ndarray:
    # sorting rows makes the result independent of how the caller ordered them
    keys = np.column_stack([X, y])
    return np.lexsort(keys.T[::-1])


def train(X, y, config: TrainConfig | None = None) -> SvmModel:
    config = config or TrainConfig()
    X, y = _as_data(X, y)
    if not np.all(np.isfinite(X)):
        raise ValueError("non-finite features")
    if not set(np.unique(y)) <= {-1.0, 1.0}:
        raise ValueError("labels must be +1/-1")
    if len(np.unique(y)) < 2:
        raise DegenerateDataset("degenerate dataset: need both classes")
    order = _canonical_order(X, y)
    X, y = X[order], y[order]

    if config.solver == "subgradient":
        w, b, info = _train_subgradient(X, y, config)
    else:
        w, b, info = _train_interior_point(X, y, config)
    model = SvmModel(w, b, config.C)
    model.meta.update(info)
    model.meta["solver"] = config.solver
    model.meta["seed"] = config.seed
    model.meta["objective"] = _objective(w, b, config.C, X, y)
    model.meta["initial_objective"] = _objective(np.zeros(X.shape[1]), 0.0, config.C, X, y)
    model.meta["train_accuracy"] = accuracy(model, X, y)
    model.meta["n_samples"] = int(X.shape[0])
    return model


def _train_subgradient(X, y, config: TrainConfig):
    """Full-batch subgradient descent on the objective divided by the sample count.

    The scaling leaves the minimizer unchanged and makes ``lr`` independent
    of dataset size.
    """
    m, d = X.shape
    w = np.zeros(d)
    b = 0.0
    obj = obj0 = _objective(w, b, config.C, X, y)
    best = (obj, w.copy(), b)
    history = [obj]
    for t in range(config.epochs):
        eta = config.lr / (1.0 + t / config.decay_epochs)
        gw, gb = _subgradient(w, b, config.C, X, y)
        w = w - eta * gw / m
        b = b - eta * gb / m
        new = _objective(w, b, config.C, X, y)
        # subgradient steps are not monotone; only a blow-up past both the
        # previous and the initial objective counts as divergence
        if not np.isfinite(new) or new > 10.0 * max(obj, obj0, 1e-300):
            raise SvmDivergence(
                f"objective grew from {obj:.6g} to {new:.6g} at epoch {t} (eta={eta:.3g})"
            )
        obj = new
        if obj < best[0]:
            best = (obj, w.copy(), b)
        history.append(best[0])
        if t >= config.patience:
            old = history[-1 - config.patience]
            if old - best[0] <= config.tol * max(abs(old), 1e-300):
                break
    return best[1], best[2], {"epochs": t + 1, "best_objective_history": history}


def _train_interior_point(X, y, config: TrainConfig):
    """Primal-dual interior point on

        min 1/2 |w|^2 + C sum xi   s.t.  y (X w + b) + xi - 1 = s >= 0,  xi >= 0

    with multipliers alpha (for s) and mu (for xi).
    """
    m, d = X.shape
    C = config.C
    w = np.zeros(d)
    b = 0.0
    xi = np.ones(m)
    s = np.ones(m)
    alpha = np.full(m, C / 2)
    mu = np.full(m, C / 2)

    def residuals(w, b, xi, s, alpha, mu):
        r_w = w - X.T @ (y * alpha)
        r_b = -float(y @ alpha)
        r_xi = C - alpha - mu
        r_p = y * (X @ w + b) + xi - 1.0 - s
        return r_w, r_b, r_xi, r_p

    def solve(r_w, r_b, r_xi, r_p, r_sa, r_xm):
        g = 1.0 / (xi / mu + s / alpha)
        h = -r_p + (xi / mu) * r_xi + r_xm / mu - r_sa / alpha
        gh = g * h
        K = np.empty((d + 1, d + 1))
        K[:d, :d] = (X.T * g) @ X
        K[:d, :d].flat[:: d + 1] += 1.0
        K[:d, d] = X.T @ g
        K[d, :d] = K[:d, d]
        K[d, d] = g.sum()
        rhs = np.empty(d + 1)
        rhs[:d] = -r_w + X.T @ (y * gh)
        rhs[d] = float(y @ gh) - r_b
        try:
            sol = np.linalg.solve(K, rhs)
        except np.linalg.LinAlgError:
            sol = np.linalg.lstsq(K, rhs, rcond=None)[0]
        dw, db = sol[:d], sol[d]
        dalpha = g * (h - y * (X @ dw) - y * db)
        dxi = (xi / mu) * (dalpha - r_xi - r_xm / xi)
        dmu = (-r_xm - mu * dxi) / xi
        ds = (-r_sa - s * dalpha) / alpha
        return dw, db, dxi, ds, dalpha, dmu

    def max_step(v, dv):
        neg = dv < 0
        if not np.any(neg):
            return 1.0
        return min(1.0, float(np.min(-v[neg] / dv[neg])))

    scale = 1.0 + C * m
    it = 0
    # near the optimum the Newton system becomes ill-conditioned and further
    # steps can lose feasibility, so the best iterate seen is the one returned
    best = (np.inf, w, b, alpha, 0.0, 0)
    for it in range(1, config.ipm_max_iter + 1):
        r_w, r_b, r_xi, r_p = residuals(w, b, xi, s, alpha, mu)
        gap = float(s @ alpha + xi @ mu) / (2 * m)
        res = max(np.max(np.abs(r_w), initial=0.0), abs(r_b), np.max(np.abs(r_xi)), np.max(np.abs(r_p)))
        merit = max(gap * 2 * m / scale, res / max(1.0, C))
        if merit < best[0]:
            best = (merit, w.copy(), b, alpha.copy(), gap, it)
        if merit <= config.ipm_tol or it - best[5] >= 10:
            break
        # predictor
        aff = solve(r_w, r_b, r_xi, r_p, s * alpha, xi * mu)
        dw, db, dxi, ds, dalpha, dmu = aff
        step = min(max_step(s, ds), max_step(xi, dxi), max_step(alpha, dalpha), max_step(mu, dmu))
        gap_aff = float((s + step * ds) @ (alpha + step * dalpha) + (xi + step * dxi) @ (mu + step * dmu)) / (2 * m)
        sigma = (gap_aff / gap) ** 3
        # corrector
        r_sa = s * alpha + ds * dalpha - sigma * gap
        r_xm = xi * mu + dxi * dmu - sigma * gap
        dw, db, dxi, ds, dalpha, dmu = solve(r_w, r_b, r_xi, r_p, r_sa, r_xm)
        step = min(max_step(s, ds), max_step(xi, dxi), max_step(alpha, dalpha), max_step(mu, dmu))
        step = min(1.0, 0.995 * step)
        w = w + step * dw
        b = b + step * db
        xi = xi + step * dxi
        s = s + step * ds
        alpha = alpha + step * dalpha
        mu = mu + step * dmu
    merit, w, b, alpha, gap, _ = best
    if merit > 1e-8:
        log.warning("interior point stopped after %d iterations (relative gap/residual %.3g)", it, merit)
    support = int(np.sum(alpha > 1e-6 * C))
    return w, b, {"iterations": it, "duality_gap": gap, "n_support": support, "ipm_merit": merit}
