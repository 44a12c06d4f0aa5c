import math

import numpy as np
import pytest

from ewsvm import features, qcore, states
from ewsvm.states import DatasetConfig, EdgeStateParams


def test_bell_states():
    s2 = 1 / math.sqrt(2)
    assert np.allclose(states.bell_state(0, 0), [s2, 0, 0, s2])
    assert np.allclose(states.bell_state(1, 0), [s2, 0, 0, -s2])
    assert np.allclose(states.bell_state(0, 1), [0, s2, s2, 0])
    assert np.allclose(states.bell_state(1, 1), [0, s2, -s2, 0])
    with pytest.raises(ValueError):
        states.bell_state(2, 0)


def test_ghz_states():
    assert np.allclose(states.ghz_state(2), states.bell_state(0, 0))
    g3 = states.ghz_state(3)
    assert g3[0] == g3[7] == pytest.approx(1 / math.sqrt(2))
    assert np.count_nonzero(g3) == 2
    assert np.count_nonzero(states.ghz_state(4)) == 2
    with pytest.raises(ValueError):
        states.ghz_state(1)


def test_ghz3_times_qubit():
    s2 = 1 / math.sqrt(2)
    v = states.ghz3_times_qubit(0.0, 0.0)
    expect = np.zeros(16)
    expect[0b0000] = expect[0b1110] = s2
    assert np.allclose(v, expect)
    plus = np.array([1, 1]) / math.sqrt(2)
    # the fourth-qubit amplitude uses theta, not theta/2
    assert np.allclose(states.ghz3_times_qubit(math.pi / 4, 0.0), np.kron(states.ghz_state(3), plus))
    assert np.allclose(states.ghz3_times_qubit(math.pi / 2, 0.0), np.kron(states.ghz_state(3), [0, 1]))
    rng = np.random.default_rng(0)
    for _ in range(10):
        v = states.ghz3_times_qubit(rng.uniform(0, math.pi), rng.uniform(0, 2 * math.pi))
        assert np.linalg.norm(v) == pytest.approx(1, abs=1e-12)


def test_bell_diagonal():
    assert np.allclose(states.bell_diagonal(0, 0, 0), np.eye(4) / 4)
    phi = qcore.projector(states.bell_state(0, 0))
    assert np.allclose(states.bell_diagonal(1, -1, 1), phi)
    with pytest.raises(ValueError, match="outside tetrahedron"):
        states.bell_diagonal(1, 1, 1)
    rho = states.bell_diagonal(0.2, -0.3, 0.1)
    lam = sorted(states.bell_diagonal_weights(0.2, -0.3, 0.1).values())
    assert np.allclose(qcore.hermitian_eigenvalues(rho), lam, atol=1e-10)


def test_werner():
    bell = states.bell_state(0, 0)
    assert np.allclose(states.werner(bell, 0), np.eye(4) / 4)
    assert np.allclose(states.werner(bell, 1), qcore.projector(bell))
    assert abs(qcore.min_pt_eigenvalue(states.werner(bell, 1 / 3), {2})) < 1e-10
    with pytest.raises(ValueError):
        states.werner(bell, 1.2)


def test_werner_features_are_collinear():
    ghz = states.ghz_state(3)
    f = features.feature_matrix([states.werner(ghz, p) for p in (0.0, 0.3, 0.55, 1.0)])
    d = f[1:] - f[0]
    # every difference is a multiple of the p = 1 direction
    ref = d[-1] / np.linalg.norm(d[-1])
    for row in d:
        assert np.linalg.norm(row - (row @ ref) * ref) < 1e-10


@pytest.mark.parametrize("base,expected", [
    (states.bell_state(0, 0), 1 / 3),
    (states.ghz_state(3), 1 / 5),
    (states.ghz_state(4), 1 / 9),
])
def test_ppt_boundary(base, expected):
    assert states.ppt_boundary(base) == pytest.approx(expected, abs=1e-9)


def test_random_product_state():
    a = states.random_product_state(3, 11)
    assert a == states.random_product_state(3, 11)
    assert np.linalg.norm(a.vector()) == pytest.approx(1, abs=1e-12)
    assert qcore.is_ppt_all(a.density())
    assert all(0 <= t <= math.pi for t in a.thetas)
    assert all(0 <= x < 2 * math.pi for x in a.alphas)


def test_random_product_state_haar_z_mean():
    rng = np.random.default_rng(5)
    u = rng.random(100_000)
    # <Z> on one qubit is cos(theta) = 1 - 2u
    z = np.cos(np.arccos(1 - 2 * u))
    assert abs(z.mean()) < 0.02
    # and the library draw agrees on a smaller sample
    zs = [np.cos(states.random_product_state(1, rng).thetas[0]) for _ in range(5000)]
    assert abs(np.mean(zs)) < 0.05


def test_product_state_round_trip_from_qubits():
    s = states.random_product_state(4, 3)
    t = states.ProductState.from_qubits([np.exp(0.7j) * q for q in s.qubits()])
    assert abs(abs(np.vdot(s.vector(), t.vector())) - 1) < 1e-12


def test_random_separable_mixture():
    rho1 = states.random_separable_mixture(2, 1, 4)
    assert np.allclose(rho1 @ rho1, rho1)  # a pure product projector
    rng = np.random.default_rng(7)
    for _ in range(1000):
        rho = states.random_separable_mixture(3, int(rng.integers(1, 9)), rng)
        assert qcore.is_ppt_all(rho)
    qcore.check_density_matrix(rho)


def test_dephased_family_is_separable_diagonal():
    ghz = states.ghz_state(4)
    rho = states.dephased(ghz, 1.0)
    assert np.allclose(np.diag(rho)[[0, 15]], 0.5)
    assert np.count_nonzero(rho - np.diag(np.diag(rho))) == 0
    assert qcore.is_ppt_all(states.dephased(ghz, 0.4))


def test_edge_state_examples():
    rho = states.edge_ppt_state(EdgeStateParams(1, 1, 1))
    assert np.allclose(np.diag(rho), 1 / 8)
    assert rho[0, 7] == rho[7, 0] == pytest.approx(1 / 8)
    rho = states.edge_ppt_state(EdgeStateParams(0.3525, 0.3196, 0.81642))
    assert np.trace(rho).real == pytest.approx(1, abs=1e-12)
    with pytest.raises(ValueError):
        EdgeStateParams(0.0, 0.5, 0.5)


def test_edge_states_are_ppt():
    rng = np.random.default_rng(8)
    for _ in range(100):
        rho = states.edge_ppt_state(EdgeStateParams(*rng.uniform(0.001, 1, size=3)))
        qcore.check_density_matrix(rho)
        assert all(qcore.is_ppt(rho, {q}) for q in (1, 2, 3))


def test_generate_dataset_two_qubit():
    data = states.generate_dataset(DatasetConfig(n_qubits=2, seed=1))
    labels = np.array([s.label for s in data])
    assert len(data) == 1000 and np.sum(labels == 1) == 500
    for s in data:
        qcore.check_density_matrix(s.rho)
        if s.label == -1:
            assert qcore.npt_cut(s.rho) is not None
        else:
            assert qcore.is_ppt_all(s.rho)


def test_generate_dataset_near_boundary_range():
    cfg = DatasetConfig(n_qubits=2, n_separable=5, n_entangled=100, p_min=1 / 3 + 1e-6, p_max=0.4, seed=3)
    ent = [s for s in states.generate_dataset(cfg) if s.label == -1]
    assert all(qcore.min_pt_eigenvalue(s.rho, {2}) < 0 for s in ent)
    assert all(1 / 3 < s.provenance["p"] <= 0.4 for s in ent)


def test_generate_dataset_unrealizable_range():
    cfg = DatasetConfig(n_qubits=2, n_separable=0, n_entangled=1, p_min=0.0, p_max=0.3)
    with pytest.raises(RuntimeError, match="cannot realize entangled sample"):
        states.generate_dataset(cfg)


def test_generate_dataset_deterministic():
    cfg = DatasetConfig(n_qubits=3, n_separable=40, n_entangled=40, seed=9, dephased_fraction=0.2,
                        mixture_fraction=0.5)
    a = states.generate_dataset(cfg)
    b = states.generate_dataset(cfg)
    assert all(np.array_equal(x.rho, y.rho) and x.provenance == y.provenance for x, y in zip(a, b))
    assert {s.provenance["family"] for s in a if s.label == 1} == {"product-mixture", "dephased", "werner"}


def test_dataset_config_validation():
    with pytest.raises(ValueError):
        DatasetConfig(family="w-state")
    with pytest.raises(ValueError):
        DatasetConfig(n_qubits=2, family="edge")
    with pytest.raises(ValueError):
        DatasetConfig(p_min=0.8, p_max=0.5)
    with pytest.raises(ValueError):
        DatasetConfig(mixture_fraction=0.9, dephased_fraction=0.2)
