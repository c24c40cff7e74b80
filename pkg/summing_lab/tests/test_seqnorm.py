import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from banach.exceptions import (
    DimensionMismatchError,
    HypothesisError,
    IndexRangeError,
    ManifestError,
    UnsupportedComputationError,
)
from banach.optimize import BOUND_EXACT, OptConfig
from banach.seqnorm import ClassId, ClassKind, VecSeq, class_norm, coordinate_axiom_check, prefix_norms
from banach.space import INF, Space

L2 = Space.pnorm(2, 2)
L1 = Space.pnorm(2, 1)

arrays = st.lists(
    st.lists(st.floats(-5, 5, allow_nan=False, allow_infinity=False), min_size=2, max_size=2),
    min_size=1,
    max_size=3,
)


def value(seq_class, x, cfg=None):
    return class_norm(seq_class, x, cfg).value


def test_lp2_of_pair():
    assert value("lp:2", VecSeq(L2, [[3, 4], [0, 0]])) == pytest.approx(5.0)


def test_scalar_norms():
    x = VecSeq.scalars([1, 2, 3])
    assert value("lp:1", x) == pytest.approx(6.0)
    assert value("linf", x) == pytest.approx(3.0)
    assert value("lpw:2", x) == pytest.approx(math.sqrt(14.0))
    assert value("mid:4/3", x) == value("lp:4/3", x)


def test_rad_of_unit_vectors():
    cert = class_norm("rad", VecSeq(L2, np.eye(2)))
    assert cert.value == pytest.approx(math.sqrt(2.0))
    assert cert.bound == BOUND_EXACT


def test_rad_sup_takes_best_prefix():
    x = VecSeq.scalars([3, 0, 0])
    assert value("RAD", x) == pytest.approx(3.0)
    assert class_norm("RAD", x).details["prefix"] == 1


def test_hilbert_closed_forms():
    x = VecSeq(L2, np.eye(2))
    assert value("lpw:2", x) == pytest.approx(1.0)
    assert value("cohen:2", x) == pytest.approx(2.0)
    assert value("mid:2", x) == pytest.approx(math.sqrt(2.0))
    assert class_norm("cohen:2", x).details["closed_form"] == "nuclear"


def test_weak_ascent_matches_spectral_norm():
    x = VecSeq(L2, [[3.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
    exact = value("lpw:2", x)
    ascent = value("lpw:2", x, OptConfig(method="ascent"))
    assert exact == pytest.approx(float(np.linalg.norm(x.vectors, 2)))
    assert ascent == pytest.approx(exact, rel=1e-6)


def test_cohen_1_is_lp_1():
    x = VecSeq(L1, [[1.0, -2.0], [0.5, 0.5]])
    assert value("cohen:1", x) == pytest.approx(value("lp:1", x))


def test_weak_norm_on_vertex_space_is_exact():
    x = VecSeq(L1, [[1.0, 2.0], [-1.0, 1.0]])
    cert = class_norm("lpw:1", x)
    # sup over the linf ball of |<phi, x_1>| + |<phi, x_2>|, attained at phi = (1, 1) and (1, -1)
    assert cert.value == pytest.approx(3.0)
    assert cert.bound == BOUND_EXACT


@pytest.mark.parametrize("text", ["lp:2", "linf", "c0", "c0w", "lpw:4/3", "lpu:2", "cohen:4", "mid:2",
                                  "rad", "RAD", "dual(lp:2)", "dual(dual(lpw:2))"])
def test_class_descriptor_round_trip(text):
    assert str(ClassId.parse(text)) == text


@pytest.mark.parametrize("text,error", [
    ("lp", ManifestError),
    ("foo:2", ManifestError),
    ("linf:2", ManifestError),
    ("lp:inf", IndexRangeError),
    ("lp:0.5", IndexRangeError),
    ("dual(rad)", HypothesisError),
    ("dual(dual(dual(lp:2)))", UnsupportedComputationError),
])
def test_bad_class_descriptors(text, error):
    with pytest.raises(error):
        ClassId.parse(text)


@pytest.mark.parametrize("text,expected", [
    ("dual(linf)", "lp:1"),
    ("dual(c0)", "lp:1"),
    ("dual(lp:1)", "linf"),
    ("dual(lp:4/3)", "lp:4"),
    ("dual(lpw:2)", "cohen:2"),
    ("dual(lpu:4)", "cohen:4/3"),
    ("dual(dual(lp:2))", "lp:2"),
    ("dual(mid:2)", "dual(mid:2)"),
])
def test_dual_identities(text, expected):
    assert str(ClassId.parse(text).equivalent()) == expected


def test_class_flags():
    assert ClassId.lp(2).flags.dual_representable
    assert not ClassId.c0w().flags.dual_representable
    assert "c00_dense" in ClassId.weak(2).flags.missing_for_dual_representation()
    assert ClassId.parse("dual(lpw:2)").flags == ClassId.cohen(2).flags
    assert ClassId.unconditional(2).caveat
    assert ClassId.lp(2).caveat is None
    assert ClassId.rad().kind is ClassKind.RAD


def test_dual_class_needs_dual_norm():
    with pytest.raises(UnsupportedComputationError):
        class_norm("dual(lp:2)", VecSeq(L2, [[1, 0]]))


def test_sequence_validation():
    with pytest.raises(DimensionMismatchError):
        VecSeq(L2, [[1, 2, 3]])
    with pytest.raises(DimensionMismatchError):
        VecSeq(L2, [[1, float("inf")]])
    with pytest.raises(DimensionMismatchError):
        VecSeq.coordinate(L2, [1, 0], 3, 2)


def test_long_rad_needs_monte_carlo():
    x = VecSeq.scalars(np.ones(13))
    with pytest.raises(UnsupportedComputationError):
        class_norm("rad", x)
    cert = class_norm("rad", x, OptConfig(rad_mc=200))
    assert (cert.method, cert.bound) == ("monte-carlo", "estimate")
    assert cert.value > 0


def test_prefix_norms_non_decreasing():
    x = VecSeq(L1, [[1.0, 0.0], [0.0, -2.0], [1.0, 1.0]])
    values = prefix_norms("lp:2", x)
    assert len(values) == 3
    assert values == sorted(values)
    assert values[0] == pytest.approx(1.0)


@pytest.mark.parametrize("seq_class", ["lp:2", "linf", "lpw:2", "cohen:2", "mid:2", "rad", "RAD", "dual(lp:1)"])
def test_coordinate_axiom(seq_class):
    lhs, rhs = coordinate_axiom_check(seq_class, L1, [0.5, -2.0], 2, length=3)
    assert lhs == pytest.approx(rhs, rel=1e-6)


@given(rows=arrays, signs=st.lists(st.sampled_from([-1.0, 1.0]), min_size=3, max_size=3))
@settings(max_examples=30, deadline=None)
def test_sign_invariance_on_vertex_space(rows, signs):
    x = VecSeq(L1, rows)
    flipped = x.with_signs(signs[: x.length])
    for seq_class in ("lp:2", "lpw:2", "linf"):
        assert value(seq_class, flipped) == pytest.approx(value(seq_class, x), rel=1e-9, abs=1e-12)


@given(rows=arrays)
@settings(max_examples=30, deadline=None)
def test_weak_below_strong(rows):
    x = VecSeq(Space.pnorm(2, INF), rows)
    assert value("lpw:2", x) <= value("lp:2", x) * (1 + 1e-9) + 1e-12
    assert value("linf", x) <= value("lpw:2", x) * (1 + 1e-9) + 1e-12
