"""State families used for training and testing, and labeled dataset generation.

Labels follow the classifier convention: +1 separable, -1 entangled.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import qcore
from .qcore import PSD_TOL, projector


# --------------------------------------------------------------------------
# pure states
# --------------------------------------------------------------------------

def basis_state(bits: str) -> np.ndarray:
    psi = np.zeros(2 ** len(bits), dtype=complex)
    psi[int(bits, 2)] = 1.0
    return psi


def bell_state(i: int, j: int) -> np.ndarray:
    """(|0,j> + (-1)^i |1,1-j>) / sqrt(2)."""
    if i not in (0, 1) or j not in (0, 1):
        raise ValueError("Bell indices must be bits")
    psi = basis_state(f"0{j}") + (-1) ** i * basis_state(f"1{1 - j}")
    return psi / math.sqrt(2)


def ghz_state(n: int) -> np.ndarray:
    if n < 2:
        raise ValueError("GHZ state needs at least two qubits")
    psi = np.zeros(2**n, dtype=complex)
    psi[0] = psi[-1] = 1 / math.sqrt(2)
    return psi


def ghz3_times_qubit(theta: float, alpha: float) -> np.ndarray:
    """GHZ_3 tensored with cos(theta)|0> + e^{i alpha} sin(theta)|1>."""
    q = np.array([math.cos(theta), np.exp(1j * alpha) * math.sin(theta)])
    return np.kron(ghz_state(3), q)


# --------------------------------------------------------------------------
# product states
# --------------------------------------------------------------------------

def qubit_vector(theta: float, alpha: float) -> np.ndarray:
    return np.array([math.cos(theta / 2), np.exp(1j * alpha) * math.sin(theta / 2)])


@dataclass(frozen=True)
class ProductState:
    """Product of single-qubit states, one ``(theta, alpha)`` pair per qubit."""

    angles: tuple[tuple[float, float], ...]

    @classmethod
    def from_arrays(cls, thetas, alphas) -> "ProductState":
        return cls(tuple((float(t), float(a)) for t, a in zip(thetas, alphas)))

    @classmethod
    def from_qubits(cls, qubits) -> "ProductState":
        """Angles of arbitrary (unnormalized) single-qubit vectors, global phase dropped."""
        pairs = []
        for v in qubits:
            v = np.asarray(v, dtype=complex)
            v = v / np.linalg.norm(v)
            r0, r1 = abs(v[0]), abs(v[1])
            theta = 2 * math.atan2(r1, r0)
            alpha = float(np.angle(v[1]) - np.angle(v[0])) if r1 > 0 and r0 > 0 else 0.0
            pairs.append((theta, alpha % (2 * math.pi)))
        return cls(tuple(pairs))

    @property
    def n_qubits(self) -> int:
        return len(self.angles)

    @property
    def thetas(self) -> np.ndarray:
        return np.array([a[0] for a in self.angles])

    @property
    def alphas(self) -> np.ndarray:
        return np.array([a[1] for a in self.angles])

    def qubits(self) -> list[np.ndarray]:
        return [qubit_vector(t, a) for t, a in self.angles]

    def vector(self) -> np.ndarray:
        return _kron_vectors(self.qubits())

    def density(self) -> np.ndarray:
        return projector(self.vector())


def _kron_vectors(vectors) -> np.ndarray:
    out = np.ones(1, dtype=complex)
    for v in vectors:
        out = np.kron(out, v)
    return out


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def random_product_state(n: int, rng_seed=None) -> ProductState:
    """Haar-random product state: theta = arccos(1 - 2u), alpha = 2 pi v per qubit."""
    if n < 1:
        raise ValueError("need at least one qubit")
    rng = _rng(rng_seed)
    u = rng.random(n)
    v = rng.random(n)
    return ProductState.from_arrays(np.arccos(1 - 2 * u), 2 * math.pi * v)


def simplex_weights(k: int, rng: np.random.Generator) -> np.ndarray:
    e = rng.exponential(size=k)
    return e / e.sum()


def random_separable_mixture(n: int, k: int, rng_seed=None) -> np.ndarray:
    """Convex mixture of ``k`` random product projectors with uniform simplex weights."""
    if k < 1:
        raise ValueError("need at least one mixture term")
    rng = _rng(rng_seed)
    weights = simplex_weights(k, rng)
    rho = np.zeros((2**n, 2**n), dtype=complex)
    for w in weights:
        rho += w * random_product_state(n, rng).density()
    return rho


# --------------------------------------------------------------------------
# mixed families
# --------------------------------------------------------------------------

def maximally_mixed(n: int) -> np.ndarray:
    return np.eye(2**n, dtype=complex) / 2**n


def werner(base, p: float) -> np.ndarray:
    """p |psi><psi| + (1 - p) I / 2^N."""
    if not 0 <= p <= 1:
        raise ValueError(f"mixing parameter p={p} outside [0, 1]")
    base = np.asarray(base, dtype=complex)
    return p * projector(base) + (1 - p) * np.eye(base.size) / base.size


def dephased(base, q: float) -> np.ndarray:
    """``q`` times the computational-basis diagonal of ``|base><base|`` plus white noise.

    A mixture of basis product states, hence separable for every ``q``.
    """
    if not 0 <= q <= 1:
        raise ValueError(f"q={q} outside [0, 1]")
    base = np.asarray(base, dtype=complex)
    dim = base.shape[0]
    return np.diag(q * np.abs(base) ** 2 + (1 - q) / dim).astype(complex)


def bell_diagonal_weights(c1: float, c2: float, c3: float) -> dict[tuple[int, int], float]:
    """Eigenvalues lambda_ij = (1 + (-1)^i c1 - (-1)^(i+j) c2 + (-1)^j c3) / 4."""
    return {
        (i, j): 0.25 * (1 + (-1) ** i * c1 - (-1) ** (i + j) * c2 + (-1) ** j * c3)
        for i in (0, 1) for j in (0, 1)
    }


def bell_diagonal(c1: float, c2: float, c3: float) -> np.ndarray:
    lam = bell_diagonal_weights(c1, c2, c3)
    if min(lam.values()) < PSD_TOL:
        raise ValueError(f"outside tetrahedron: eigenvalues {sorted(lam.values())}")
    rho = np.eye(4, dtype=complex)
    for c, p in zip((c1, c2, c3), "XYZ"):
        rho += c * qcore.pauli_matrix(p + p)
    return rho / 4


@dataclass(frozen=True)
class EdgeStateParams:
    a: float
    b: float
    c: float

    def __post_init__(self):
        if min(self.a, self.b, self.c) <= 0:
            raise ValueError("edge-state parameters must be positive")

    @property
    def norm(self) -> float:
        a, b, c = self.a, self.b, self.c
        return 2 + a + 1 / a + b + 1 / b + c + 1 / c


def edge_ppt_state(params: EdgeStateParams) -> np.ndarray:
    """Three-qubit PPT entangled edge state.

    Unit corners at |000><000|, |000><111|, |111><000|, |111><111| and the
    diagonal (a, b, c, 1/c, 1/b, 1/a) on the six remaining basis states.
    """
    a, b, c = params.a, params.b, params.c
    m = np.diag([1, a, b, c, 1 / c, 1 / b, 1 / a, 1]).astype(complex)
    m[0, 7] = m[7, 0] = 1
    return m / params.norm


def ppt_boundary(base, tol: float = 1e-12) -> float:
    """Largest p for which werner(base, p) is PPT on every cut (bisection)."""
    lo, hi = 0.0, 1.0
    if qcore.is_ppt_all(werner(base, hi)):
        return 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        rho = werner(base, mid)
        if min(qcore.min_pt_eigenvalue(rho, cut) for cut in qcore.bipartitions(qcore.n_qubits_of(rho))) >= 0:
            lo = mid
        else:
            hi = mid
    return lo


# --------------------------------------------------------------------------
# datasets
# --------------------------------------------------------------------------

ENTANGLED_FAMILIES = ("werner", "edge", "ghz3-qubit")
MAX_REDRAWS = 1000


@dataclass
class DatasetConfig:
    """What to sample.

    ``family`` picks the entangled class: ``"werner"`` (Werner states of
    ``base``, GHZ_N by default), ``"edge"`` (three-qubit PPT edge states with
    a, b, c drawn in ``edge_range``) or ``"ghz3-qubit"`` (Werner states of
    GHZ_3 times a random qubit).  ``p_min``/``p_max`` is the entangled
    sampling range.  The separable class mixes random product mixtures with
    sub-threshold Werner states of the same base.
    """

    n_qubits: int = 2
    n_separable: int = 500
    n_entangled: int = 500
    family: str = "werner"
    base: str = "ghz"
    p_min: float = 0.5
    p_max: float = 1.0
    mixture_fraction: float = 0.7
    max_terms: int = 8
    separable_p_max: float | None = None
    dephased_fraction: float = 0.0
    edge_range: tuple[float, float] = (0.0, 1.0)
    seed: int = 0

    def __post_init__(self):
        if self.family not in ENTANGLED_FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.family == "edge" and self.n_qubits != 3:
            raise ValueError("edge family is three-qubit only")
        if self.family == "ghz3-qubit" and self.n_qubits != 4:
            raise ValueError("ghz3-qubit family is four-qubit only")
        if not 1 <= self.n_qubits <= 6:
            raise ValueError("n_qubits must be in 1..6")
        if not 0 <= self.p_min <= self.p_max <= 1:
            raise ValueError("need 0 <= p_min <= p_max <= 1")
        if self.n_separable < 0 or self.n_entangled < 0:
            raise ValueError("sample counts must be non-negative")
        if not 0 <= self.mixture_fraction <= 1 or self.max_terms < 1:
            raise ValueError("bad separable mixture settings")
        if not 0 <= self.dephased_fraction <= 1 - self.mixture_fraction:
            raise ValueError("dephased_fraction must fit beside mixture_fraction")


@dataclass
class LabeledSample:
    rho: np.ndarray
    label: int
    provenance: dict = field(default_factory=dict)


def base_state(config: DatasetConfig) -> np.ndarray:
    n = config.n_qubits
    if config.family == "ghz3-qubit":
        # PPT properties are invariant under a unitary on the fourth qubit
        return ghz3_times_qubit(0.0, 0.0)
    if config.family == "edge":
        return ghz_state(3)
    if config.base == "ghz":
        return ghz_state(n)
    if config.base.startswith("bell") and n == 2:
        i, j = int(config.base[-2]), int(config.base[-1])
        return bell_state(i, j)
    raise ValueError(f"unknown base state {config.base!r}")


def sample_rng(seed: int, index: int, stream: int) -> np.random.Generator:
    """Independent generator for one sample, derived from the master seed."""
    return np.random.default_rng([seed, stream, index])


def _entangled_sample(config: DatasetConfig, rng, base) -> LabeledSample:
    for _ in range(MAX_REDRAWS):
        if config.family == "edge":
            lo, hi = config.edge_range
            a, b, c = (float(x) for x in rng.uniform(lo, hi, size=3))
            if min(a, b, c) <= 0:
                continue
            rho = edge_ppt_state(EdgeStateParams(a, b, c))
            return LabeledSample(rho, -1, {"family": "edge", "a": a, "b": b, "c": c})
        p = float(rng.uniform(config.p_min, config.p_max))
        if config.family == "ghz3-qubit":
            theta = float(rng.uniform(0, math.pi))
            alpha = float(rng.uniform(0, 2 * math.pi))
            rho = werner(ghz3_times_qubit(theta, alpha), p)
            prov = {"family": "ghz3-qubit", "p": p, "theta": theta, "alpha": alpha}
        else:
            rho = werner(base, p)
            prov = {"family": "werner", "p": p}
        cut = qcore.npt_cut(rho)
        if cut is not None:
            prov["npt_cut"] = "{" + ",".join(str(q) for q in sorted(cut)) + "}"
            return LabeledSample(rho, -1, prov)
    raise RuntimeError("cannot realize entangled sample in configured range")


def _separable_sample(config: DatasetConfig, rng, base, p_cut: float) -> LabeledSample:
    n = config.n_qubits
    for _ in range(MAX_REDRAWS):
        u = rng.random()
        if u < config.mixture_fraction:
            k = int(rng.integers(1, config.max_terms + 1))
            rho = random_separable_mixture(n, k, rng)
            prov = {"family": "product-mixture", "k": k}
        elif u < config.mixture_fraction + config.dephased_fraction:
            q = float(rng.uniform(0, 1))
            rho = dephased(base, q)
            prov = {"family": "dephased", "q": q}
        else:
            p = float(rng.uniform(0, p_cut))
            if config.family == "ghz3-qubit":
                theta = float(rng.uniform(0, math.pi))
                alpha = float(rng.uniform(0, 2 * math.pi))
                rho = werner(ghz3_times_qubit(theta, alpha), p)
                prov = {"family": "ghz3-qubit", "p": p, "theta": theta, "alpha": alpha}
            else:
                rho = werner(base, p)
                prov = {"family": "werner", "p": p}
        if qcore.is_ppt_all(rho):
            return LabeledSample(rho, +1, prov)
    raise RuntimeError("cannot realize separable sample")


def separable_cutoff(config: DatasetConfig, base) -> float:
    if config.separable_p_max is not None:
        return config.separable_p_max
    return ppt_boundary(base)


def generate_dataset(config: DatasetConfig) -> list[LabeledSample]:
    """Separable samples first, then entangled ones; deterministic in ``config.seed``.

    Entangled Werner-type samples are certified by a negative partial
    transpose (redrawn otherwise); edge states are PPT and carry their label
    by construction.  Every separable sample is re-checked PPT on all cuts.
    """
    base = base_state(config)
    p_cut = separable_cutoff(config, base)
    samples = [
        _separable_sample(config, sample_rng(config.seed, i, 0), base, p_cut)
        for i in range(config.n_separable)
    ]
    samples += [
        _entangled_sample(config, sample_rng(config.seed, i, 1), base)
        for i in range(config.n_entangled)
    ]
    return samples
