"""
Dual sequence classes: the dual norm, the pairing J, the coordinate functionals I
and the canonical embedding into the bidual class.

In finite dimensions E'' is identified with E (the bidual Space object is E itself).
"""
import logging
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np

from .exceptions import DimensionMismatchError, HypothesisError, NonLinearFunctionalError
from .optimize import ConvexObjective, NormCert, OptConfig, maximize_over_seq_ball
from .seqnorm import (
    ClassId,
    ClassKind,
    VecSeq,
    aligned_start,
    ball_equivalent,
    coordinate_start,
    class_norm,
    norm_of_array,
    pairing_objective,
)
from .space import Space, conjugate_index


@dataclass(frozen=True)
class DualNormProblem:
    """Norm of x in X^dual(E), with X = inner_class and E = base_space."""

    inner_class: ClassId
    base_space: Space
    x: VecSeq

    def __post_init__(self):
        inner = ClassId.coerce(self.inner_class)
        object.__setattr__(self, "inner_class", inner)
        if not inner.flags.spherically_complete:
            raise HypothesisError(
                f"{inner} is not spherically complete; its dual class is only defined "
                f"for sign-invariant classes",
                missing={str(inner): ["spherically_complete"]},
            )
        if not same_space(self.x.space, self.base_space):
            raise DimensionMismatchError(f"Sequence lives in {self.x.space}, problem is posed on {self.base_space}")

    @property
    def dual_class(self) -> ClassId:
        return ClassId.dual(self.inner_class)


def same_space(a: Space, b: Space) -> bool:
    if a.dim != b.dim:
        return False
    if a.dim == 1:
        # every norm on R is a multiple of |t|
        return abs(a.norm(np.ones(1)) - b.norm(np.ones(1))) <= 1e-12
    return a == b


def _dual_by_ascent(inner: ClassId, space: Space, X: np.ndarray, cfg: OptConfig) -> NormCert:
    """sup of sum_j |<phi_j, x_j>| over the unit ball of inner(E')"""
    X = np.asarray(X, dtype=float)
    cert = maximize_over_seq_ball(
        pairing_objective(X), inner, space.dual, len(X), cfg,
        starts=[aligned_start(space, X), coordinate_start(space, X)],
    )
    phi = cert.witness.vectors
    cert.norming = np.sign(np.sum(phi * X, axis=1))[:, None] * phi
    return cert


def sequence_norm(seq_class, space: Space, X, cfg: OptConfig) -> NormCert:
    """Norm of a (k, dim) array under any class, dual classes included."""
    resolved = ball_equivalent(seq_class, space)
    if resolved.kind is ClassKind.DUAL:
        return _dual_by_ascent(resolved.inner, space, X, cfg)
    return norm_of_array(resolved, space, X, cfg)


def dual_norm(problem: DualNormProblem, cfg: Optional[OptConfig] = None) -> NormCert:
    """
    ||x|| in X^dual(E) = sup over the unit ball of X(E') of sum_j |<phi_j, x_j>|.
    Closed forms are used when the dual identity is known, unless method=ascent.
    """
    cfg = cfg or OptConfig()
    dual_class = problem.dual_class
    space = problem.base_space
    X = problem.x.vectors
    resolved = ball_equivalent(dual_class, space)
    if cfg.method != "ascent" and resolved.kind is not ClassKind.DUAL:
        cert = norm_of_array(resolved, space, X, cfg)
        cert.details["closed_form"] = str(resolved)
    else:
        inner = resolved.inner if resolved.kind is ClassKind.DUAL else problem.inner_class
        cert = _dual_by_ascent(inner, space, X, cfg)
    cert.details["class"] = str(dual_class)
    if dual_class.caveat:
        logging.warning(dual_class.caveat)
    return cert


def sup_equality_check(problem: DualNormProblem, cfg: Optional[OptConfig] = None) -> Tuple[float, float]:
    """
    (sup |sum_j <phi_j, x_j>|, sup sum_j |<phi_j, x_j>|) over the unit ball of X(E').
    The second is the dual norm and uses its closed form when there is one.
    """
    cfg = cfg or OptConfig()
    X = problem.x.vectors
    space = problem.base_space

    absolute = dual_norm(problem, cfg)
    starts = [aligned_start(space, X)]
    if absolute.norming is not None:
        # the norming functionals of x already reach the dual norm in the plain pairing
        starts.append(np.asarray(absolute.norming, dtype=float))

    def evaluate(phi):
        s = float(np.sum(phi * X))
        return abs(s), np.sign(s) * X

    plain = maximize_over_seq_ball(
        ConvexObjective(evaluate=evaluate, batch=lambda phis: np.abs(np.sum(phis * X, axis=(-2, -1)))),
        problem.inner_class, space.dual, len(X), cfg, starts=starts,
    )
    # the plain maximiser is feasible for the absolute sup as well
    absolute_value = max(absolute.value, pairing_objective(X)(plain.witness.vectors))
    return plain.value, absolute_value


def pairing_apply(phis: VecSeq, x: VecSeq) -> float:
    """J(phi)(x) = sum_j <phi_j, x_j>"""
    if phis.length != x.length:
        raise DimensionMismatchError(f"Pairing needs equal lengths, got {phis.length} and {x.length}")
    if not same_space(phis.space, x.space.dual):
        raise DimensionMismatchError(f"Functionals live in {phis.space}, expected the dual of {x.space}")
    return float(np.sum(phis.vectors * x.vectors))


def functional_norm_as_dual_element(inner_class, space: Space, length: int, phis: VecSeq,
                                    cfg: Optional[OptConfig] = None) -> Tuple[float, float]:
    """
    (norm of x -> J(phi)(x) on X(E) at the given length, norm of phi in X^dual(E')).
    Equal for dual-representable X.
    """
    cfg = cfg or OptConfig()
    inner = ClassId.coerce(inner_class)
    missing = inner.flags.missing_for_dual_representation()
    if missing:
        raise HypothesisError(
            f"{inner} is not dual-representable: missing {', '.join(missing)}",
            missing={str(inner): missing},
        )
    if phis.length != length or not same_space(phis.space, space.dual):
        raise DimensionMismatchError(f"Expected {length} functionals on the dual of {space}")
    Phi = phis.vectors

    def evaluate(z):
        s = float(np.sum(Phi * z))
        return abs(s), np.sign(s) * Phi

    op = maximize_over_seq_ball(
        ConvexObjective(evaluate=evaluate, batch=lambda zs: np.abs(np.sum(zs * Phi, axis=(-2, -1)))),
        inner, space, length, cfg, starts=[aligned_start(space.dual, Phi)],
    )
    as_dual = dual_norm(DualNormProblem(inner, space.dual, phis), cfg)
    return op.value, as_dual.value


def coordinate_functionals(functional: Callable[[VecSeq], float], space: Space, length: int,
                           seed: int = 0, linearity_checks: int = 3) -> VecSeq:
    """
    Recover (phi_j) with <phi_j, x> = functional(x . e_j) by evaluating on basis sequences.
    The functional is checked for linearity on random pairs first.
    """
    n = space.dim
    rng = np.random.default_rng([seed, length, n])
    for _ in range(linearity_checks):
        a, b = rng.standard_normal((2, length, n))
        alpha, beta = rng.standard_normal(2)
        lhs = float(functional(VecSeq(space, alpha * a + beta * b)))
        rhs = alpha * float(functional(VecSeq(space, a))) + beta * float(functional(VecSeq(space, b)))
        if abs(lhs - rhs) > 1e-9 * max(1.0, abs(lhs), abs(rhs)):
            raise NonLinearFunctionalError(f"Functional is not linear: f(au+bv)={lhs!r}, af(u)+bf(v)={rhs!r}")
    if abs(float(functional(VecSeq.zeros(space, length)))) > 1e-12:
        raise NonLinearFunctionalError("Functional does not vanish at zero")

    basis = np.eye(length * n).reshape(length * n, length, n)
    values = np.array([float(functional(VecSeq(space, e))) for e in basis])
    return VecSeq(space.dual, values.reshape(length, n))


def bidual_gap(inner_class, x: VecSeq, cfg: Optional[OptConfig] = None) -> Tuple[float, float]:
    """(||x|| in X(E), ||x|| in (X^dual)^dual(E)); the second never exceeds the first."""
    cfg = cfg or OptConfig()
    inner = ClassId.coerce(inner_class)
    flags = inner.flags
    missing = [name for name in ("spherically_complete", "linearly_stable") if not getattr(flags, name)]
    if missing:
        raise HypothesisError(
            f"The bidual embedding needs {inner} to be {' and '.join(missing).replace('_', ' ')}",
            missing={str(inner): missing},
        )
    normX = class_norm(inner, x, cfg).value
    normBidual = dual_norm(DualNormProblem(ClassId.dual(inner), x.space, x), cfg).value
    return normX, normBidual


def mid_sandwich(p, x: VecSeq, cfg: Optional[OptConfig] = None) -> Tuple[float, float, float]:
    """
    (||x||_{lp(E)}, ||x|| in dual(mid:p*), ||x|| in cohen:p), a non-decreasing chain.
    For p = 1 all three coincide with the ell_1 norm.
    """
    cfg = cfg or OptConfig()
    strong = class_norm(ClassId.lp(p), x, cfg).value
    if ClassId.lp(p).p == 1:
        return strong, strong, strong
    middle = dual_norm(DualNormProblem(ClassId.mid(conjugate_index(p)), x.space, x), cfg).value
    cohen = class_norm(ClassId.cohen(p), x, cfg).value
    return strong, middle, cohen
