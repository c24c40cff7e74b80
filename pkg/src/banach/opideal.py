"""
Linear operators between finite-dimensional spaces, their (X;Y)-summing norms and
the duality statements relating T to T' and T''.
"""
import logging
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Tuple

import numpy as np

from .dualize import same_space, sequence_norm
from .exceptions import DimensionMismatchError, HypothesisError, UnsupportedComputationError
from .optimize import (
    ASCENT,
    BOUND_EXACT,
    EXACT,
    LOWER_BOUND,
    ConvexObjective,
    NormCert,
    OptConfig,
    maximize_over_ball,
    maximize_over_seq_ball,
)
from .seqnorm import ClassId, VecSeq
from .space import INF, PNorm, Space

DEFAULT_TOLERANCE = 1e-3
INCONCLUSIVE_BAND = 0.1
CROSS_SEED_ROUNDS = 8


@dataclass(frozen=True, eq=False)
class LinOp:
    """T: domain -> codomain as a (codomain.dim, domain.dim) matrix"""

    domain: Space
    codomain: Space
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.shape != (self.codomain.dim, self.domain.dim):
            raise DimensionMismatchError(
                f"Operator matrix must be {self.codomain.dim}x{self.domain.dim}, got shape {m.shape}"
            )
        if not np.all(np.isfinite(m)):
            raise DimensionMismatchError("Operator matrix must be finite")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def identity(cls, space: Space, scale: float = 1.0) -> "LinOp":
        return cls(space, space, scale * np.eye(space.dim))

    @classmethod
    def zero(cls, domain: Space, codomain: Space) -> "LinOp":
        return cls(domain, codomain, np.zeros((codomain.dim, domain.dim)))

    @classmethod
    def gaussian(cls, domain: Space, codomain: Space, rng: np.random.Generator) -> "LinOp":
        return cls(domain, codomain, rng.standard_normal((codomain.dim, domain.dim)))

    def adjoint(self) -> "LinOp":
        return LinOp(self.codomain.dual, self.domain.dual, self.matrix.T)

    def apply(self, v) -> np.ndarray:
        return self.matrix @ self.domain.check_vector(v)

    def apply_elementwise(self, x: VecSeq) -> VecSeq:
        if not same_space(x.space, self.domain):
            raise DimensionMismatchError(f"Sequence lives in {x.space}, operator is defined on {self.domain}")
        return VecSeq(self.codomain, x.vectors @ self.matrix.T)

    def compose(self, other: "LinOp") -> "LinOp":
        """self o other"""
        if not same_space(other.codomain, self.domain):
            raise DimensionMismatchError(f"Cannot compose: {other.codomain} does not match {self.domain}")
        return LinOp(other.domain, self.codomain, self.matrix @ other.matrix)

    def operator_norm(self, cfg: Optional[OptConfig] = None) -> NormCert:
        return operator_norm(self, cfg)

    def describe(self) -> Dict:
        return {"domain": self.domain.describe(), "codomain": self.codomain.describe(), "matrix": self.matrix.tolist()}

    def __repr__(self):
        return f"LinOp({self.domain} -> {self.codomain})"


def adjoint(T: LinOp) -> LinOp:
    return T.adjoint()


def apply_elementwise(T: LinOp, x: VecSeq) -> VecSeq:
    return T.apply_elementwise(x)


def _is_hilbert(space: Space) -> bool:
    return isinstance(space.norm_spec, PNorm) and space.norm_spec.q == 2


def operator_norm(T: LinOp, cfg: Optional[OptConfig] = None) -> NormCert:
    """sup over the unit ball of the domain of ||Tv|| in the codomain"""
    cfg = cfg or OptConfig()
    M = T.matrix
    if _is_hilbert(T.domain) and _is_hilbert(T.codomain) and cfg.method != "ascent":
        u, s, vt = np.linalg.svd(M)
        return NormCert(float(s[0]), vt[0], EXACT, BOUND_EXACT, details={"closed_form": "spectral"})
    F = T.codomain
    objective = ConvexObjective(
        func=lambda v: F.norm(M @ v),
        subgradient=lambda v: M.T @ F.subgradient(M @ v),
        batch=lambda vs: F.norms(vs @ M.T),
    )
    return maximize_over_ball(objective, T.domain, cfg)


def summing_norm(X, Y, T: LinOp, k: int, cfg: Optional[OptConfig] = None) -> NormCert:
    """
    ||T||_{X;Y} at length k: sup of ||(T x_j)_j|| in Y(F) over sequences of
    length k in the unit ball of X(E).
    """
    cfg = cfg or OptConfig()
    X, Y = ClassId.coerce(X), ClassId.coerce(Y)
    E, F = T.domain, T.codomain
    if k < 1:
        raise DimensionMismatchError(f"Sequence length must be positive, got {k}")
    M = T.matrix
    details = {"X": str(X), "Y": str(Y), "k": int(k)}
    if not np.any(M):
        return NormCert(0.0, VecSeq.zeros(E, k), EXACT, BOUND_EXACT, details=details)

    inner_cfg = cfg.nested()

    def evaluate(z):
        cert = sequence_norm(Y, F, z @ M.T, inner_cfg)
        return cert.value, np.asarray(cert.norming, dtype=float) @ M

    # v . e_j for a maximiser v of ||Tv|| already reaches ||T||
    v = np.asarray(operator_norm(T, inner_cfg).witness, dtype=float)
    starts = []
    for j in range(k):
        start = np.zeros((k, E.dim))
        start[j] = v
        starts.append(start)
    if k > 1:
        starts.append(np.tile(v, (k, 1)))
    cfg = replace(cfg, restarts=max(cfg.restarts, E.dim * k))
    cert = maximize_over_seq_ball(ConvexObjective(evaluate=evaluate), X, E, k, cfg, starts=starts)
    cert.details.update(details)
    return cert


def _norming_sequence(Y: ClassId, T: LinOp, cert: NormCert, cfg: OptConfig) -> Optional[np.ndarray]:
    """Functionals norming (T x_j) in Y(F), x the witness of cert"""
    x = getattr(cert.witness, "vectors", cert.witness)
    if x is None or not np.any(x):
        return None
    norming = sequence_norm(Y, T.codomain, np.asarray(x, dtype=float) @ T.matrix.T, cfg.nested()).norming
    if norming is None or not np.any(norming):
        return None
    return np.asarray(norming, dtype=float)


def _candidate(X: ClassId, Y: ClassId, T: LinOp, z: np.ndarray, cfg: OptConfig, floor: float = 0.0,
               partner: Optional[np.ndarray] = None) -> NormCert:
    """
    ||(T z_j)|| in Y(F) / ||z|| in X(E); the divisor never drops below floor.
    `partner` is a sequence from the unit ball of dual Y(F'); sum_j |<T z_j, partner_j>|
    bounds the Y norm from below when the nested norm is an ascent value.
    """
    inner_cfg = cfg.nested()
    scale = max(sequence_norm(X, T.domain, z, inner_cfg).value, floor)
    z = z / scale
    image = z @ T.matrix.T
    cert = sequence_norm(Y, T.codomain, image, inner_cfg)
    value = cert.value
    if partner is not None and cert.bound != BOUND_EXACT:
        value = max(value, float(np.abs(np.sum(image * partner, axis=1)).sum()))
    return NormCert(value, VecSeq(T.domain, z), ASCENT, LOWER_BOUND)


def _cross_seed(first: NormCert, first_problem: Tuple, second: NormCert, second_problem: Tuple,
                cfg: OptConfig) -> Tuple[NormCert, NormCert]:
    """
    Improve two summing norms that are adjoint to each other, (X; Y) for T and
    (dual Y; dual X) for T'.

    The functionals norming (T x_j) in Y(F) lie in the unit ball of dual Y(F'),
    so as a sequence for T' they reach at least the value of x for T, and the
    same holds the other way round. Transfers alternate until neither side gains.
    """
    certs = [first, second]
    problems = [first_problem, second_problem]
    for _ in range(CROSS_SEED_ROUNDS):
        improved = False
        for source in (0, 1):
            target = 1 - source
            if certs[target].bound == BOUND_EXACT:
                continue
            _, Y, T = problems[source]
            z = _norming_sequence(Y, T, certs[source], cfg)
            if z is None:
                continue
            # norming functionals are feasible, so only an overshoot is divided out
            partner = getattr(certs[source].witness, "vectors", certs[source].witness)
            candidate = _candidate(*problems[target], z, cfg, floor=1.0, partner=np.asarray(partner, dtype=float))
            if candidate.value > certs[target].value * (1 + cfg.tol):
                logging.debug(f"Adjoint witness raised {certs[target].value:.12g} to {candidate.value:.12g}")
                candidate.details = {**certs[target].details, "seeded_by": "adjoint witness"}
                certs[target] = candidate
                improved = True
        if not improved:
            break
    return certs[0], certs[1]


@dataclass
class InequalityCheck:
    """
    lhs <= rhs up to a relative tolerance; `asserted` when the hypotheses guarantee it.

    A violation is only a failure when rhs is exact or the shortfall exceeds
    INCONCLUSIVE_BAND: an ascent value of rhs is a lower bound and may still
    rise above lhs.
    """

    name: str
    lhs: float
    rhs: float
    asserted: bool
    tol: float = DEFAULT_TOLERANCE
    rhs_bound: str = BOUND_EXACT

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs

    @property
    def holds(self) -> bool:
        return self.margin >= -self.tol * max(1.0, abs(self.rhs))

    @property
    def status(self) -> str:
        if self.holds:
            return "ok"
        if self.rhs_bound != BOUND_EXACT and self.margin >= -INCONCLUSIVE_BAND * max(1.0, abs(self.rhs)):
            return "inconclusive"
        return "fail"

    @property
    def passed(self) -> bool:
        return self.status != "fail"

    def to_dict(self) -> Dict:
        return {
            "name": self.name,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "margin": self.margin,
            "asserted": self.asserted,
            "holds": self.holds,
            "status": self.status,
            "passed": self.passed,
        }


@dataclass
class DualityReport:
    kind: str
    X: ClassId
    Y: ClassId
    k: int
    values: Dict[str, float]
    checks: List[InequalityCheck]
    hypotheses: Dict[str, Dict[str, bool]]
    caveats: List[str] = field(default_factory=list)
    certificates: Dict[str, NormCert] = field(default_factory=dict, repr=False)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks if c.asserted)

    @property
    def pair(self) -> Tuple[float, float]:
        first, second = list(self.values)[:2]
        return self.values[first], self.values[second]

    def to_dict(self) -> Dict:
        return {
            "kind": self.kind,
            "X": str(self.X),
            "Y": str(self.Y),
            "k": self.k,
            "values": dict(self.values),
            "difference": self.pair[0] - self.pair[1],
            "checks": [c.to_dict() for c in self.checks],
            "hypotheses": self.hypotheses,
            "caveats": list(self.caveats),
            "methods": {name: cert.bound for name, cert in self.certificates.items()},
            "passed": self.passed,
        }


def _caveats(*classes: ClassId) -> List[str]:
    return [c.caveat for c in classes if c.caveat]


def _failing(hypotheses: Dict[str, bool]) -> List[str]:
    return [name for name, ok in hypotheses.items() if not ok]


def adjoint_duality_report(X, Y, T: LinOp, k: int, cfg: Optional[OptConfig] = None,
                           tol: float = DEFAULT_TOLERANCE) -> DualityReport:
    """
    a = ||T||_{X;Y}, b = ||T'||_{dual(Y);dual(X)}.
    b <= a when X is dual-representable and Y linearly stable, finitely dominated
    and spherically complete; a <= b when Y is reflexive.
    """
    cfg = cfg or OptConfig()
    X, Y = ClassId.coerce(X), ClassId.coerce(Y)
    fx, fy = X.flags, Y.flags
    lower = {
        f"{X} dual-representable": fx.dual_representable,
        f"{Y} linearly stable": fy.linearly_stable,
        f"{Y} finitely dominated": fy.finitely_dominated,
        f"{Y} spherically complete": fy.spherically_complete,
    }
    upper = {f"{Y} reflexive": fy.reflexive}
    if _failing(lower) and _failing(upper):
        raise HypothesisError(
            f"Neither adjoint inequality applies to ({X}; {Y}): "
            f"{', '.join(_failing(lower))} fail(s) and {Y} is not reflexive",
            missing={"b <= a": _failing(lower), "a <= b": _failing(upper)},
        )
    dual_X, dual_Y = ClassId.dual(X), ClassId.dual(Y)
    a = summing_norm(X, Y, T, k, cfg)
    b = summing_norm(dual_Y, dual_X, T.adjoint(), k, cfg)
    a, b = _cross_seed(a, (X, Y, T), b, (dual_Y, dual_X, T.adjoint()), cfg)
    logging.info(f"adjoint duality ({X}; {Y}) k={k}: a={a.value:.9g} b={b.value:.9g}")
    return DualityReport(
        kind="adjoint-duality",
        X=X, Y=Y, k=k,
        values={"a": a.value, "b": b.value},
        checks=[
            InequalityCheck("b <= a", b.value, a.value, asserted=not _failing(lower), tol=tol, rhs_bound=a.bound),
            InequalityCheck("a <= b", a.value, b.value, asserted=not _failing(upper), tol=tol, rhs_bound=b.bound),
        ],
        hypotheses={"b <= a": lower, "a <= b": upper},
        caveats=_caveats(X, Y),
        certificates={"a": a, "b": b},
    )


def reverse_duality_report(X, Y, T: LinOp, k: int, cfg: Optional[OptConfig] = None,
                           tol: float = DEFAULT_TOLERANCE) -> DualityReport:
    """
    c = ||T||_{dual(Y);dual(X)}, d = ||T'||_{X;Y}.
    d <= c when X is spherically complete and dual(Y) is dual-representable and
    dual-reflexive; c <= d when X and Y are spherically complete.
    """
    cfg = cfg or OptConfig()
    X, Y = ClassId.coerce(X), ClassId.coerce(Y)
    dual_X, dual_Y = ClassId.dual(X), ClassId.dual(Y)
    fdy = dual_Y.flags
    lower = {
        f"{X} spherically complete": X.flags.spherically_complete,
        f"{dual_Y} dual-representable": fdy.dual_representable,
        f"{dual_Y} dual-reflexive": fdy.dual_reflexive,
    }
    upper = {
        f"{X} spherically complete": X.flags.spherically_complete,
        f"{Y} spherically complete": Y.flags.spherically_complete,
    }
    c = summing_norm(dual_Y, dual_X, T, k, cfg)
    d = summing_norm(X, Y, T.adjoint(), k, cfg)
    d, c = _cross_seed(d, (X, Y, T.adjoint()), c, (dual_Y, dual_X, T), cfg)
    logging.info(f"reverse duality ({X}; {Y}) k={k}: c={c.value:.9g} d={d.value:.9g}")
    return DualityReport(
        kind="reverse-duality",
        X=X, Y=Y, k=k,
        values={"c": c.value, "d": d.value},
        checks=[
            InequalityCheck("d <= c", d.value, c.value, asserted=not _failing(lower), tol=tol, rhs_bound=c.bound),
            InequalityCheck("c <= d", c.value, d.value, asserted=not _failing(upper), tol=tol, rhs_bound=d.bound),
        ],
        hypotheses={"d <= c": lower, "c <= d": upper},
        caveats=_caveats(X, Y),
        certificates={"c": c, "d": d},
    )


def second_adjoint_check(X, Y, T: LinOp, k: int, cfg: Optional[OptConfig] = None,
                         tol: float = 1e-9) -> DualityReport:
    """a = ||T||_{X;Y} and e = ||T''||_{X;Y}; the hypotheses are recorded, not enforced."""
    cfg = cfg or OptConfig()
    X, Y = ClassId.coerce(X), ClassId.coerce(Y)
    hypotheses = {
        f"{X} dual-representable": X.flags.dual_representable,
        f"{Y} spherically complete": Y.flags.spherically_complete,
        f"{Y} dual-reflexive": Y.flags.dual_reflexive,
        f"dual({Y}) dual-representable": Y.flags.spherically_complete and ClassId.dual(Y).flags.dual_representable,
    }
    asserted = not _failing(hypotheses)
    a = summing_norm(X, Y, T, k, cfg)
    e = summing_norm(X, Y, T.adjoint().adjoint(), k, cfg)
    return DualityReport(
        kind="second-adjoint",
        X=X, Y=Y, k=k,
        values={"a": a.value, "e": e.value},
        checks=[
            InequalityCheck("e <= a", e.value, a.value, asserted=asserted, tol=tol),
            InequalityCheck("a <= e", a.value, e.value, asserted=asserted, tol=tol),
        ],
        hypotheses={"a = e": hypotheses},
        caveats=_caveats(X, Y),
        certificates={"a": a, "e": e},
    )


def isometric_embedding_into_linf(space: Space) -> LinOp:
    """
    F -> PNorm(inf)^N, y -> (<phi, y>)_phi over one functional per +-pair of
    extreme points of the dual ball.
    """
    points = space.dual.extreme_points()
    if points is None:
        raise UnsupportedComputationError(f"{space} has no finite norming set; cannot embed into PNorm(inf)")
    reps = np.array([u for u in points if u[np.flatnonzero(u)[0]] > 0])
    return LinOp(space, Space.pnorm(len(reps), INF), reps)


def injectivity_probe(X, Y, T: LinOp, k: int, cfg: Optional[OptConfig] = None,
                      tol: float = DEFAULT_TOLERANCE) -> DualityReport:
    """Compare ||T||_{X;Y} with ||J o T||_{X;Y} for an isometric embedding J of the codomain."""
    cfg = cfg or OptConfig()
    X, Y = ClassId.coerce(X), ClassId.coerce(Y)
    J = isometric_embedding_into_linf(T.codomain)
    hypotheses = {
        f"{X} finitely dominated": X.flags.finitely_dominated,
        f"{Y} finitely dominated": Y.flags.finitely_dominated,
        f"{Y} finitely injective": Y.flags.finitely_injective,
    }
    asserted = not _failing(hypotheses)
    plain = summing_norm(X, Y, T, k, cfg)
    embedded = summing_norm(X, Y, J.compose(T), k, cfg)
    return DualityReport(
        kind="injectivity",
        X=X, Y=Y, k=k,
        values={"plain": plain.value, "embedded": embedded.value},
        checks=[
            InequalityCheck("embedded <= plain", embedded.value, plain.value, asserted=asserted, tol=tol),
            InequalityCheck("plain <= embedded", plain.value, embedded.value, asserted=asserted, tol=tol),
        ],
        hypotheses={"plain = embedded": hypotheses},
        caveats=_caveats(X, Y),
        certificates={"plain": plain, "embedded": embedded},
    )


def ideal_property_check(X, Y, A: LinOp, T: LinOp, B: LinOp, k: int, cfg: Optional[OptConfig] = None,
                         tol: float = DEFAULT_TOLERANCE) -> DualityReport:
    """||A T B||_{X;Y} <= ||A|| ||T||_{X;Y} ||B||"""
    cfg = cfg or OptConfig()
    X, Y = ClassId.coerce(X), ClassId.coerce(Y)
    composed = summing_norm(X, Y, A.compose(T).compose(B), k, cfg)
    middle = summing_norm(X, Y, T, k, cfg)
    # (B x_j) is a competitor for ||T|| whenever x is one for ||A T B||
    image = composed.witness.vectors @ B.matrix.T
    if middle.bound != BOUND_EXACT and np.any(image):
        candidate = _candidate(X, Y, T, image, cfg)
        if candidate.value > middle.value:
            candidate.details = {**middle.details, "seeded_by": "composed witness"}
            middle = candidate
    bound = operator_norm(A, cfg).value * middle.value * operator_norm(B, cfg).value
    return DualityReport(
        kind="ideal-property",
        X=X, Y=Y, k=k,
        values={"composed": composed.value, "bound": bound},
        checks=[InequalityCheck("||ATB|| <= ||A|| ||T|| ||B||", composed.value, bound, asserted=True, tol=tol,
                                rhs_bound=middle.bound)],
        hypotheses={"ideal": {"operator ideal": True}},
        caveats=_caveats(X, Y),
        certificates={"composed": composed, "middle": middle},
    )
