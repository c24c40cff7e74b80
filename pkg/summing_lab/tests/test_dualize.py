import math

import numpy as np
import pytest

from banach.dualize import (
    DualNormProblem,
    bidual_gap,
    coordinate_functionals,
    dual_norm,
    functional_norm_as_dual_element,
    mid_sandwich,
    pairing_apply,
    sup_equality_check,
)
from banach.exceptions import DimensionMismatchError, HypothesisError, NonLinearFunctionalError
from banach.optimize import BOUND_EXACT, OptConfig
from banach.seqnorm import ClassId, VecSeq
from banach.space import INF, Space

LINE = Space.pnorm(1, 2)
L2 = Space.pnorm(2, 2)
SCALARS = VecSeq.scalars([1.0, 2.0, 3.0])
X = VecSeq(L2, [[1.0, 2.0], [0.5, -1.0]])


def dual_value(inner, x, cfg=None):
    return dual_norm(DualNormProblem(ClassId.coerce(inner), x.space, x), cfg).value


def test_dual_of_linf_is_l1():
    cert = dual_norm(DualNormProblem(ClassId.linf(), LINE, SCALARS))
    assert cert.value == pytest.approx(6.0)
    assert cert.bound == BOUND_EXACT
    assert cert.details["closed_form"] == "lp:1"


def test_dual_of_l1_is_linf():
    assert dual_value("lp:1", SCALARS) == pytest.approx(3.0)


def test_dual_of_l2_on_hilbert_space():
    assert dual_value("lp:2", VecSeq(L2, [[3, 4], [0, 0]])) == pytest.approx(5.0)


def test_ascent_agrees_with_closed_form():
    closed = dual_value("lp:2", SCALARS)
    ascent = dual_value("lp:2", SCALARS, OptConfig(method="ascent"))
    assert closed == pytest.approx(math.sqrt(14.0))
    assert ascent == pytest.approx(closed, rel=1e-9)


def test_dual_of_weak_is_cohen():
    x = VecSeq(L2, np.eye(2))
    assert dual_value("lpw:2", x) == pytest.approx(2.0)


def test_dual_requires_sign_invariant_class():
    with pytest.raises(HypothesisError):
        DualNormProblem(ClassId.rad(), LINE, SCALARS)


def test_dual_problem_space_mismatch():
    with pytest.raises(DimensionMismatchError):
        DualNormProblem(ClassId.lp(2), Space.pnorm(2, 1), X)


def test_sup_equality():
    plain, absolute = sup_equality_check(DualNormProblem(ClassId.lp(2), L2, X))
    assert plain == pytest.approx(float(np.linalg.norm(X.vectors)), rel=1e-9)
    assert absolute == pytest.approx(plain, rel=1e-9)


def test_sup_equality_uses_the_closed_form_dual():
    x = VecSeq(Space.pnorm(2, 1), X.vectors)
    plain, absolute = sup_equality_check(DualNormProblem(ClassId.lp("4/3"), x.space, x))
    assert absolute == pytest.approx(dual_value("lp:4/3", x), rel=1e-12)
    assert plain == pytest.approx(absolute, rel=1e-6)


def test_sup_equality_for_a_weak_class():
    x = VecSeq(Space.pnorm(2, 1), X.vectors)
    plain, absolute = sup_equality_check(DualNormProblem(ClassId.weak(4), x.space, x))
    assert absolute >= dual_value("lpw:4", x) * (1 - 1e-12)
    assert plain == pytest.approx(absolute, rel=1e-3)


def test_pairing_apply():
    phis = VecSeq(L2.dual, [[1.0, 0.0], [2.0, 2.0]])
    assert pairing_apply(phis, X) == pytest.approx(1.0 + 1.0 - 2.0)
    with pytest.raises(DimensionMismatchError):
        pairing_apply(phis.prefix(1), X)
    with pytest.raises(DimensionMismatchError):
        pairing_apply(VecSeq(Space.pnorm(2, 1), phis.vectors), X)


def test_coordinate_functionals_recover_the_pairing():
    A = np.array([[1.0, -2.0], [0.5, 3.0], [0.0, 1.0]])
    phis = coordinate_functionals(lambda x: float(np.sum(A * x.vectors)), L2, 3)
    assert np.allclose(phis.vectors, A)
    assert phis.space == L2.dual


def test_coordinate_functionals_reject_non_linear():
    with pytest.raises(NonLinearFunctionalError):
        coordinate_functionals(lambda x: float(np.linalg.norm(x.vectors)), L2, 2)
    with pytest.raises(NonLinearFunctionalError):
        coordinate_functionals(lambda x: 1.0 + float(np.sum(x.vectors)), L2, 2)


def test_functional_norm_equals_dual_norm():
    phis = VecSeq(L2.dual, [[1.0, 2.0], [-2.0, 0.5]])
    as_operator, as_dual = functional_norm_as_dual_element("lp:2", L2, 2, phis)
    assert as_operator == pytest.approx(float(np.linalg.norm(phis.vectors)), rel=1e-9)
    assert as_dual == pytest.approx(as_operator, rel=1e-9)


def test_functional_norm_on_vertex_space():
    space = Space.pnorm(2, 1)
    phis = VecSeq(space.dual, [[1.0, -3.0], [2.0, 0.5]])
    as_operator, as_dual = functional_norm_as_dual_element("lp:1", space, 2, phis)
    # dual of lp:1 is linf: the largest sup-norm of a row
    assert as_operator == pytest.approx(3.0)
    assert as_dual == pytest.approx(3.0)


def test_functional_norm_needs_dual_representable_class():
    phis = VecSeq(L2.dual, [[1.0, 0.0]])
    with pytest.raises(HypothesisError):
        functional_norm_as_dual_element("c0w", L2, 1, phis)


@pytest.mark.parametrize("inner", ["lp:2", "lp:1", "linf"])
def test_bidual_embedding_is_contractive(inner):
    space = Space.pnorm(2, INF)
    x = VecSeq(space, [[1.0, -2.0], [0.5, 0.5], [2.0, 1.0]])
    norm_x, norm_bidual = bidual_gap(inner, x)
    assert norm_bidual <= norm_x * (1 + 1e-9)


def test_bidual_of_lp_is_isometric():
    norm_x, norm_bidual = bidual_gap("lp:2", X)
    assert norm_bidual == pytest.approx(norm_x)


def test_bidual_needs_sign_invariance():
    with pytest.raises(HypothesisError):
        bidual_gap("rad", X)


def test_mid_sandwich_on_hilbert_space():
    strong, middle, cohen = mid_sandwich(2, X)
    assert strong <= middle * (1 + 1e-9)
    assert middle <= cohen * (1 + 1e-9)
    s = np.linalg.svd(X.vectors, compute_uv=False)
    assert cohen == pytest.approx(float(s.sum()))


def test_mid_sandwich_collapses_at_one():
    a, b, c = mid_sandwich(1, X)
    assert a == b == c
