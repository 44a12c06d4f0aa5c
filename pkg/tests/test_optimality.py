import numpy as np
import pytest

from ewsvm import cli, optimality, qcore, states
from ewsvm.optimality import INCONCLUSIVE, NONDECOMPOSABLE, OPTIMAL, TangentSet
from ewsvm.states import EdgeStateParams

IDEAL = 0.5 * np.eye(4) - qcore.projector(states.bell_state(0, 0))


def decomposable_witness():
    # Q^{T_1} with Q >= 0 is nonnegative on every PPT state
    v = np.random.default_rng(0).normal(size=8) + 1j * np.random.default_rng(1).normal(size=8)
    w = qcore.partial_transpose(qcore.projector(v / np.linalg.norm(v)), {1})
    return w / np.trace(w).real


def test_ideal_witness_is_optimal():
    ts = optimality.tangent_states(IDEAL, restarts=256)
    assert ts.span_rank == 4 and not ts.short
    assert np.all(np.abs(ts.values) < optimality.EPS_TAN)
    assert optimality.optimality_verdict(ts, 2).verdict == OPTIMAL
    assert len(ts.table()) == len(ts.states)


def test_span_rank_examples():
    e = np.eye(4)
    assert optimality.span_rank([e[0], e[3]]) == 2
    assert optimality.span_rank([e[0], 1j * e[0]]) == 1  # a global phase does not add rank
    assert optimality.span_rank([]) == 0
    ts = TangentSet([], np.array([]), 0, 4, 16, True)
    assert optimality.optimality_verdict(ts, 2).verdict == INCONCLUSIVE


def test_verdict_is_order_independent():
    ts = optimality.tangent_states(IDEAL, restarts=128)
    perm = np.random.default_rng(2).permutation(len(ts.states))
    vecs = [ts.states[i].vector() for i in perm]
    assert optimality.span_rank(vecs) == ts.span_rank


def test_shifted_witness_has_no_tangent_states():
    ts = optimality.tangent_states(IDEAL + 0.01 * np.eye(4), restarts=64)
    assert ts.span_rank == 0 and ts.short
    assert optimality.optimality_verdict(ts, 2).verdict == INCONCLUSIVE


def test_bundled_two_qubit_reference_has_no_tangent_span():
    ts = optimality.tangent_states(cli.load_reference("w1"), restarts=256)
    assert ts.span_rank < 4


def test_default_grid():
    grid = optimality.default_pptes_grid()
    assert len(grid) == 20**3 + 1
    assert grid[-1] == optimality.NAMED_EDGE_POINT
    assert min(min(g) for g in grid) == pytest.approx(0.05)


def test_scan_identity_and_decomposable_find_nothing():
    small = optimality.default_pptes_grid(6)
    assert optimality.pptes_scan(np.eye(8) / 8, small) == []
    hits = optimality.pptes_scan(decomposable_witness(), small)
    assert hits == []
    assert optimality.nondecomposability_verdict(hits).verdict == INCONCLUSIVE


def test_scan_rejects_wrong_size():
    with pytest.raises(ValueError):
        optimality.pptes_scan(IDEAL)


def test_bundled_edge_reference_at_named_point():
    W = cli.load_reference("ew22")
    rho = states.edge_ppt_state(EdgeStateParams(*optimality.NAMED_EDGE_POINT))
    assert W.value(rho) == pytest.approx(-0.0129, abs=2e-3)
    assert W.value(rho) == pytest.approx(-0.013049, abs=1e-6)
    hits = optimality.pptes_scan(W, [optimality.NAMED_EDGE_POINT])
    assert len(hits) == 1
    v = optimality.nondecomposability_verdict(hits)
    assert v.verdict == NONDECOMPOSABLE and v.detail["hits"] == 1


def test_edge_curve_of_bundled_reference():
    curve = optimality.edge_trace_curve(cli.load_reference("ew22"))
    alpha, beta, gamma = curve.coefficients
    assert beta == pytest.approx(0.0007, abs=1e-9)
    assert gamma == pytest.approx(0.0972, abs=1e-9)
    assert alpha == pytest.approx(-0.175597, abs=1e-5)
    assert curve.residual < 1e-9
    assert len(curve.traces) == 19


def test_edge_curve_of_maximally_mixed():
    # n * Tr(rho / 8) = n / 8, and n = 2 + a + 1/a + b + 1/b + c + 1/c
    b, c = 0.3196, 0.81642
    curve = optimality.edge_trace_curve(np.eye(8) / 8, fixed=(b, c))
    alpha, beta, gamma = curve.coefficients
    assert beta == pytest.approx(1 / 8) and gamma == pytest.approx(1 / 8)
    assert alpha == pytest.approx((2 + b + 1 / b + c + 1 / c) / 8)
    assert np.allclose(curve.traces, 1 / 8)


def test_edge_curve_errors():
    with pytest.raises(ValueError):
        optimality.edge_trace_curve(np.eye(8) / 8, axis="d")
    with pytest.raises(ValueError):
        optimality.edge_trace_curve(IDEAL)


@pytest.mark.parametrize("name", ["wghz", "w4q"])
def test_valid_multiqubit_references_are_not_tangent(name):
    W = cli.load_reference(name)
    ts = optimality.tangent_states(W, restarts=64)
    assert ts.span_rank == 0
