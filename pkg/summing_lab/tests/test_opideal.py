import math

import numpy as np
import pytest

from banach.exceptions import DimensionMismatchError, HypothesisError, UnsupportedComputationError
from banach.opideal import (
    LinOp,
    adjoint,
    adjoint_duality_report,
    apply_elementwise,
    ideal_property_check,
    InequalityCheck,
    injectivity_probe,
    isometric_embedding_into_linf,
    operator_norm,
    reverse_duality_report,
    second_adjoint_check,
    summing_norm,
)
from banach.optimize import BOUND_EXACT, LOWER_BOUND
from banach.seqnorm import VecSeq, class_norm
from banach.space import INF, Space

L1 = Space.pnorm(2, 1)
L2 = Space.pnorm(2, 2)
M = np.array([[1.0, 2.0], [3.0, 4.0]])


def test_operator_shape_checked():
    with pytest.raises(DimensionMismatchError):
        LinOp(L2, Space.pnorm(3, 2), M)
    with pytest.raises(DimensionMismatchError):
        LinOp(L2, L2, [[1.0, math.nan], [0.0, 1.0]])


def test_adjoint_acts_between_dual_spaces():
    T = LinOp(L1, Space.pnorm(2, INF), M)
    Tt = adjoint(T)
    assert np.array_equal(Tt.matrix, M.T)
    assert Tt.domain == Space.pnorm(2, 1)
    assert Tt.codomain == Space.pnorm(2, INF)
    assert adjoint(Tt).domain is T.domain


def test_apply_elementwise():
    T = LinOp(L2, L2, M)
    x = VecSeq(L2, [[1.0, 0.0], [0.0, 1.0]])
    assert apply_elementwise(T, x).vectors.tolist() == [[1.0, 3.0], [2.0, 4.0]]
    with pytest.raises(DimensionMismatchError):
        apply_elementwise(T, VecSeq(L1, [[1.0, 0.0]]))


def test_compose():
    A = LinOp(L2, L2, M)
    B = LinOp.identity(L2, 2.0)
    assert np.array_equal(A.compose(B).matrix, 2.0 * M)
    with pytest.raises(DimensionMismatchError):
        A.compose(LinOp.identity(L1))


def test_operator_norms():
    assert operator_norm(LinOp(L1, L1, M)).value == pytest.approx(6.0)
    assert operator_norm(LinOp(Space.pnorm(2, INF), Space.pnorm(2, INF), M)).value == pytest.approx(7.0)
    spectral = operator_norm(LinOp(L2, L2, M))
    assert spectral.value == pytest.approx(float(np.linalg.norm(M, 2)))
    assert spectral.details["closed_form"] == "spectral"


def test_identity_summing_norm_is_one():
    cert = summing_norm("lp:2", "lp:2", LinOp.identity(L2), 1)
    assert cert.value == pytest.approx(1.0, rel=1e-9)


def test_zero_operator():
    cert = summing_norm("lpw:2", "lp:2", LinOp.zero(L2, L2), 3)
    assert cert.value == 0.0
    assert cert.bound == BOUND_EXACT


def test_weak_to_strong_identity_at_length_two():
    cert = summing_norm("lpw:2", "lp:2", LinOp.identity(L2), 2)
    assert cert.value <= math.sqrt(2.0) + 1e-9
    assert cert.value == pytest.approx(math.sqrt(2.0), rel=1e-3)
    assert (cert.details["X"], cert.details["Y"], cert.details["k"]) == ("lpw:2", "lp:2", 2)


def test_summing_norm_on_vertex_spaces_is_exact():
    T = LinOp(L1, L1, M)
    cert = summing_norm("lp:1", "lp:1", T, 2)
    assert cert.value == pytest.approx(6.0)
    assert cert.bound == BOUND_EXACT


def test_summing_norm_rejects_empty_length():
    with pytest.raises(DimensionMismatchError):
        summing_norm("lp:2", "lp:2", LinOp.identity(L2), 0)


def test_adjoint_duality_on_vertex_spaces():
    report = adjoint_duality_report("lp:1", "lp:1", LinOp(L1, L1, M), 2)
    a, b = report.pair
    assert a == pytest.approx(6.0)
    assert b == pytest.approx(a)
    assert report.passed
    data = report.to_dict()
    assert data["kind"] == "adjoint-duality"
    assert data["hypotheses"]["b <= a"]["lp:1 linearly stable"]
    assert data["methods"] == {"a": "exact", "b": "exact"}


def test_adjoint_duality_without_hypotheses():
    with pytest.raises(HypothesisError) as excinfo:
        adjoint_duality_report("lp:2", "rad", LinOp.identity(L1), 1)
    assert "rad spherically complete" in excinfo.value.missing["b <= a"]


def test_reverse_duality_on_vertex_spaces():
    report = reverse_duality_report("lp:1", "lp:1", LinOp(L1, L1, M), 1)
    c, d = report.pair
    assert c == pytest.approx(6.0)
    assert d == pytest.approx(c)
    assert report.passed


def test_second_adjoint_is_identical():
    rng = np.random.default_rng(3)
    T = LinOp.gaussian(L2, L2, rng)
    report = second_adjoint_check("lp:2", "lp:2", T, 2)
    assert report.values["e"] == pytest.approx(report.values["a"], rel=1e-12)
    assert report.passed
    assert all(report.hypotheses["a = e"].values())


def test_linf_embedding_is_isometric():
    J = isometric_embedding_into_linf(L1)
    assert J.codomain == Space.pnorm(2, INF)
    for v in ([1.0, -2.0], [0.3, 0.4], [-1.0, 0.0]):
        assert J.codomain.norm(J.apply(v)) == pytest.approx(L1.norm(v))
    with pytest.raises(UnsupportedComputationError):
        isometric_embedding_into_linf(L2)


def test_injectivity_on_vertex_spaces():
    report = injectivity_probe("lp:1", "lp:1", LinOp(L1, L1, M), 1)
    plain, embedded = report.pair
    assert embedded == pytest.approx(plain)
    assert report.passed


def test_ideal_property():
    A = LinOp(L1, L1, [[1.0, 0.0], [1.0, 1.0]])
    B = LinOp(L1, L1, [[0.5, -1.0], [0.0, 2.0]])
    report = ideal_property_check("lp:1", "lp:1", A, LinOp(L1, L1, M), B, 2)
    assert report.passed
    composed, bound = report.pair
    assert composed <= bound


def test_adjoint_duality_on_smooth_spaces():
    L4 = Space.pnorm(2, 4)
    T = LinOp.gaussian(L4, L4, np.random.default_rng(1))
    report = adjoint_duality_report("lpu:4/3", "lp:2", T, 2)
    a, b = report.pair
    assert a >= b * (1 - 1e-3)
    assert report.checks[0].holds
    assert report.passed, report.to_dict()


def test_adjoint_witness_is_feasible_and_replays():
    L4 = Space.pnorm(2, 4)
    T = LinOp.gaussian(L4, L4, np.random.default_rng(1))
    a = adjoint_duality_report("lpu:4/3", "lp:2", T, 2).certificates["a"]
    assert class_norm("lpu:4/3", a.witness).value <= 1 + 1e-3
    assert class_norm("lp:2", apply_elementwise(T, a.witness)).value == pytest.approx(a.value, rel=1e-9)


def test_violation_of_a_lower_bound_is_inconclusive():
    check = InequalityCheck("b <= a", 1.05, 1.0, asserted=True, rhs_bound=LOWER_BOUND)
    assert not check.holds
    assert check.status == "inconclusive"
    assert check.passed
    assert check.to_dict()["status"] == "inconclusive"


def test_large_or_exact_violations_fail():
    assert InequalityCheck("b <= a", 1.05, 1.0, asserted=True).status == "fail"
    assert InequalityCheck("b <= a", 1.5, 1.0, asserted=True, rhs_bound=LOWER_BOUND).status == "fail"
    assert InequalityCheck("b <= a", 1.0, 1.0 + 1e-9, asserted=True).status == "ok"


def test_injectivity_needs_finitely_dominated_classes():
    report = injectivity_probe("lpw:2", "lp:2", LinOp(L1, L1, M), 1)
    hypotheses = report.hypotheses["plain = embedded"]
    assert hypotheses == {
        "lpw:2 finitely dominated": False,
        "lp:2 finitely dominated": True,
        "lp:2 finitely injective": True,
    }
    assert not any(c.asserted for c in report.checks)
