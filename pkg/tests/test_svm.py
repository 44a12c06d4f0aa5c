import numpy as np
import pytest

from ewsvm import features, states, svm
from ewsvm.svm import SvmModel, TrainConfig

TOY_X = np.array([[2.0], [-2.0]])
TOY_Y = np.array([1.0, -1.0])


def random_problem(rng, m=40, d=5):
    X = rng.normal(size=(m, d))
    y = np.where(X @ rng.normal(size=d) + 0.3 * rng.normal(size=m) > 0, 1.0, -1.0)
    return X, y


def test_objective_examples():
    rng = np.random.default_rng(0)
    X, y = random_problem(rng)
    assert svm.hinge_objective(SvmModel(np.zeros(5), 0.0, 3.0), X, y) == pytest.approx(3.0 * len(y))
    assert svm.hinge_objective(SvmModel([0.5], 0.0, 10.0), TOY_X, TOY_Y) == pytest.approx(0.125)
    m1 = SvmModel(rng.normal(size=5) * 0.1, 0.2, 1.0)
    m2 = SvmModel(m1.w, m1.b, 2.0)
    reg = 0.5 * m1.w @ m1.w
    assert svm.hinge_objective(m2, X, y) - reg == pytest.approx(2 * (svm.hinge_objective(m1, X, y) - reg))


def test_subgradient_matches_finite_differences():
    rng = np.random.default_rng(1)
    checked = 0
    while checked < 50:
        X, y = random_problem(rng, m=20, d=4)
        model = SvmModel(rng.normal(size=4), float(rng.normal()), float(rng.uniform(0.5, 5)))
        if np.min(np.abs(svm.margins(model.w, model.b, X, y) - 1)) < 1e-4:
            continue
        gw, gb = svm.hinge_subgradient(model, X, y)
        h = 1e-7
        num = []
        for k in range(5):
            e = np.zeros(5)
            e[k] = h
            plus = SvmModel(model.w + e[:4], model.b + e[4], model.C)
            minus = SvmModel(model.w - e[:4], model.b - e[4], model.C)
            num.append((svm.hinge_objective(plus, X, y) - svm.hinge_objective(minus, X, y)) / (2 * h))
        assert np.allclose(np.append(gw, gb), num, atol=1e-5)
        checked += 1


@pytest.mark.parametrize("solver", svm.SOLVERS)
def test_toy_converges_to_hard_margin_solution(solver):
    model = svm.train(TOY_X, TOY_Y, TrainConfig(C=100.0, solver=solver))
    assert model.w[0] == pytest.approx(0.5, abs=0.02)
    assert model.b == pytest.approx(0.0, abs=0.02)
    assert svm.predict(model, np.array([2.0]))[0] == 1


def test_interior_point_hits_kkt_optimum():
    model = svm.train(TOY_X, TOY_Y, TrainConfig(C=10.0))
    assert model.w[0] == pytest.approx(0.5, abs=1e-9)
    assert model.b == pytest.approx(0.0, abs=1e-9)


def test_interior_point_optimum_beats_perturbations():
    rng = np.random.default_rng(2)
    X, y = random_problem(rng, m=60, d=6)
    model = svm.train(X, y, TrainConfig(C=2.0))
    best = svm.hinge_objective(model, X, y)
    for _ in range(200):
        d = rng.normal(size=7) * 1e-3
        trial = SvmModel(model.w + d[:6], model.b + d[6], 2.0)
        assert svm.hinge_objective(trial, X, y) >= best - 1e-9
    sub = svm.train(X, y, TrainConfig(C=2.0, solver="subgradient"))
    assert sub.meta["objective"] >= best - 1e-9


def test_subgradient_best_objective_monotone():
    rng = np.random.default_rng(3)
    X, y = random_problem(rng)
    model = svm.train(X, y, TrainConfig(solver="subgradient", epochs=300))
    hist = np.array(model.meta["best_objective_history"])
    assert np.all(np.diff(hist) <= 0)
    assert model.meta["objective"] <= model.meta["initial_objective"]


def test_predict_examples():
    model = SvmModel(np.zeros(3), 1.0, 1.0)
    assert svm.predict(model, np.array([5.0, -1.0, 0.0])) == (1, 1.0)
    toy = SvmModel([0.5], 0.0, 10.0)
    assert svm.predict(toy, np.array([2.0])) == (1, 1.0)
    with pytest.raises(ValueError):
        svm.predict(toy, np.zeros(2))


def test_decision_value_affine_on_werner_line():
    rng = np.random.default_rng(4)
    model = SvmModel(rng.normal(size=16), 0.3, 1.0)
    bell = states.bell_state(0, 0)
    v = [svm.predict(model, features.feature_vector(states.werner(bell, p)))[1] for p in (0, 0.5, 1)]
    assert abs(v[1] - 0.5 * (v[0] + v[2])) < 1e-10


def test_two_qubit_werner_dataset_accuracy():
    data = states.generate_dataset(states.DatasetConfig(n_qubits=2, n_separable=1000, n_entangled=1000))
    X = features.feature_matrix([s.rho for s in data])
    y = np.array([s.label for s in data], dtype=float)
    model = svm.train(X, y)
    assert model.meta["train_accuracy"] >= 0.99


@pytest.mark.parametrize("solver", svm.SOLVERS)
def test_train_is_permutation_invariant(solver):
    rng = np.random.default_rng(5)
    X, y = random_problem(rng)
    cfg = TrainConfig(solver=solver, epochs=200)
    a = svm.train(X, y, cfg)
    perm = rng.permutation(len(y))
    b = svm.train(X[perm], y[perm], cfg)
    assert np.array_equal(a.w, b.w) and a.b == b.b


def test_scaling_keeps_predictions():
    rng = np.random.default_rng(6)
    X, y = random_problem(rng)
    a = svm.train(X, y, TrainConfig(C=1.0))
    b = svm.train(3.0 * X, y, TrainConfig(C=1.0))
    la = np.sign(svm.decision_values(a, X))
    lb = np.sign(svm.decision_values(b, 3.0 * X))
    assert np.mean(la == lb) >= 0.95


def test_train_errors():
    with pytest.raises(svm.DegenerateDataset, match="degenerate dataset"):
        svm.train(np.ones((3, 2)), np.ones(3))
    with pytest.raises(ValueError):
        svm.train(np.array([[np.nan], [1.0]]), TOY_Y)
    with pytest.raises(ValueError):
        TrainConfig(C=0)
    with pytest.raises(ValueError):
        TrainConfig(solver="smo")


def test_divergence_is_reported():
    X = np.array([[1e6], [-1e6]])
    with pytest.raises(svm.SvmDivergence, match="objective grew"):
        svm.train(X, TOY_Y, TrainConfig(solver="subgradient", lr=10.0))
