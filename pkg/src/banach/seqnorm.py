"""
Vector-valued sequence classes and their norms on finite sequences.

Every norm routine returns a NormCert whose `norming` field holds a subgradient of
the class norm at the input sequence; nested maximisations step along it.
"""
import logging
import re
from dataclasses import dataclass, fields
from enum import Enum
from itertools import product
from typing import Dict, List, Optional

import numpy as np

from .exceptions import (
    DimensionMismatchError,
    HypothesisError,
    IndexRangeError,
    ManifestError,
    UnsupportedComputationError,
)
from .optimize import (
    BOUND_EXACT,
    ESTIMATE,
    EXACT,
    MONTE_CARLO,
    ConvexObjective,
    NormCert,
    OptConfig,
    maximize_over_ball,
    maximize_over_seq_ball,
)
from .space import INF, PNorm, Space, conjugate_index, format_index, lp_norms, lp_subgradient, to_index

RAD_EXACT_MAX_LENGTH = 12
MAX_DUAL_DEPTH = 2


@dataclass(frozen=True, eq=False)
class VecSeq:
    """A finite sequence (x_1, ..., x_k) of vectors of one space, stored as a (k, dim) array."""

    space: Space
    vectors: np.ndarray

    def __post_init__(self):
        arr = np.array(self.vectors, dtype=float)
        if arr.ndim == 1 and self.space.dim == 1:
            arr = arr[:, None]
        if arr.ndim != 2 or arr.shape[1] != self.space.dim:
            raise DimensionMismatchError(
                f"Sequence vectors must have dimension {self.space.dim}, got shape {arr.shape}"
            )
        if arr.shape[0] < 1:
            raise DimensionMismatchError("A sequence needs at least one vector")
        if not np.all(np.isfinite(arr)):
            raise DimensionMismatchError("Sequence vectors must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "vectors", arr)

    @classmethod
    def scalars(cls, values, space: Optional[Space] = None) -> "VecSeq":
        return cls(space or Space.pnorm(1, 2), np.asarray(values, dtype=float).reshape(-1, 1))

    @classmethod
    def zeros(cls, space: Space, length: int) -> "VecSeq":
        return cls(space, np.zeros((length, space.dim)))

    @classmethod
    def coordinate(cls, space: Space, v, j: int, length: int) -> "VecSeq":
        """The sequence v . e_j (1-based j) padded with zeros to `length`."""
        if not 1 <= j <= length:
            raise DimensionMismatchError(f"Coordinate {j} outside 1..{length}")
        arr = np.zeros((length, space.dim))
        arr[j - 1] = space.check_vector(v)
        return cls(space, arr)

    @property
    def length(self) -> int:
        return self.vectors.shape[0]

    def __len__(self):
        return self.length

    def prefix(self, m: int) -> "VecSeq":
        return VecSeq(self.space, self.vectors[:m])

    def with_signs(self, signs) -> "VecSeq":
        return VecSeq(self.space, self.vectors * np.asarray(signs, dtype=float)[:, None])

    def norms(self) -> np.ndarray:
        return self.space.norms(self.vectors)

    def to_list(self) -> List[List[float]]:
        return self.vectors.tolist()

    def __repr__(self):
        return f"VecSeq(k={self.length}, {self.space})"


class ClassKind(Enum):
    LP = "lp"
    LINF = "linf"
    C0 = "c0"
    C0W = "c0w"
    LPW = "lpw"
    LPU = "lpu"
    COHEN = "cohen"
    MID = "mid"
    RAD = "rad"
    RAD_SUP = "RAD"
    DUAL = "dual"


INDEXED_KINDS = (ClassKind.LP, ClassKind.LPW, ClassKind.LPU, ClassKind.COHEN, ClassKind.MID)
SUP_KINDS = (ClassKind.LINF, ClassKind.C0, ClassKind.C0W)
SCALAR_COLLAPSE_KINDS = (ClassKind.LPW, ClassKind.LPU, ClassKind.COHEN, ClassKind.MID)


@dataclass(frozen=True)
class ClassFlags:
    linearly_stable: bool = False
    finitely_determined: bool = False
    finitely_dominated: bool = False
    finitely_injective: bool = False
    spherically_complete: bool = False
    c00_dense: bool = False
    reflexive: bool = False
    dual_reflexive: bool = False

    def missing_for_dual_representation(self) -> List[str]:
        required = ("linearly_stable", "finitely_dominated", "finitely_injective", "spherically_complete", "c00_dense")
        return [name for name in required if not getattr(self, name)]

    @property
    def dual_representable(self) -> bool:
        return not self.missing_for_dual_representation()

    def as_dict(self) -> Dict[str, bool]:
        out = {f.name: getattr(self, f.name) for f in fields(self)}
        out["dual_representable"] = self.dual_representable
        return out


_ALL = dict(
    linearly_stable=True, finitely_determined=True, finitely_dominated=True, finitely_injective=True,
    spherically_complete=True, c00_dense=True, reflexive=True, dual_reflexive=True,
)

BASE_FLAGS = {
    ClassKind.LP: ClassFlags(**_ALL),
    ClassKind.LINF: ClassFlags(
        linearly_stable=True, finitely_determined=True, finitely_injective=True,
        spherically_complete=True, reflexive=True, dual_reflexive=True,
    ),
    ClassKind.C0: ClassFlags(
        linearly_stable=True, finitely_dominated=True, finitely_injective=True,
        spherically_complete=True, c00_dense=True,
    ),
    ClassKind.C0W: ClassFlags(linearly_stable=True, spherically_complete=True),
    ClassKind.LPW: ClassFlags(
        linearly_stable=True, finitely_determined=True, finitely_injective=True, spherically_complete=True,
    ),
    ClassKind.LPU: ClassFlags(
        linearly_stable=True, finitely_dominated=True, finitely_injective=True,
        spherically_complete=True, c00_dense=True,
    ),
    ClassKind.COHEN: ClassFlags(linearly_stable=True, finitely_determined=True, spherically_complete=True),
    ClassKind.MID: ClassFlags(linearly_stable=True, finitely_determined=True, spherically_complete=True),
    ClassKind.RAD: ClassFlags(linearly_stable=True, finitely_dominated=True),
    ClassKind.RAD_SUP: ClassFlags(linearly_stable=True, finitely_determined=True),
}

CAVEATS = {
    ClassKind.LPU: "lpu and lpw norms coincide on finite sequences; only the class metadata differs",
    ClassKind.C0: "c0 and linf norms coincide on finite sequences; only the class metadata differs",
    ClassKind.C0W: "c0w and linf norms coincide on finite sequences; only the class metadata differs",
}


@dataclass(frozen=True)
class ClassId:
    """Descriptor of a sequence class, e.g. lp:2, lpw:4/3, dual(lpu:2)."""

    kind: ClassKind
    p: Optional[object] = None
    inner: Optional["ClassId"] = None

    def __post_init__(self):
        if self.kind in INDEXED_KINDS:
            if self.p is None:
                raise IndexRangeError(f"Class {self.kind.value} needs an index p")
            p = to_index(self.p)
            if p == INF:
                raise IndexRangeError(f"Class {self.kind.value} takes p in [1, inf), got inf")
            object.__setattr__(self, "p", p)
        elif self.p is not None:
            raise IndexRangeError(f"Class {self.kind.value} takes no index")
        if self.kind is ClassKind.DUAL:
            if self.inner is None:
                raise ManifestError("dual(...) needs an inner class")
            if not self.inner.flags.spherically_complete:
                raise HypothesisError(
                    f"Cannot dualize {self.inner}: the dual class needs a spherically complete "
                    f"inner class (sign-invariant norm)",
                    missing={str(self.inner): ["spherically_complete"]},
                )
            if self.depth > MAX_DUAL_DEPTH:
                raise UnsupportedComputationError(f"Dual nesting deeper than {MAX_DUAL_DEPTH} is not supported")
        elif self.inner is not None:
            raise ManifestError(f"Class {self.kind.value} takes no inner class")

    # constructors
    @classmethod
    def lp(cls, p) -> "ClassId":
        return cls(ClassKind.LP, p)

    @classmethod
    def linf(cls) -> "ClassId":
        return cls(ClassKind.LINF)

    @classmethod
    def c0(cls) -> "ClassId":
        return cls(ClassKind.C0)

    @classmethod
    def c0w(cls) -> "ClassId":
        return cls(ClassKind.C0W)

    @classmethod
    def weak(cls, p) -> "ClassId":
        return cls(ClassKind.LPW, p)

    @classmethod
    def unconditional(cls, p) -> "ClassId":
        return cls(ClassKind.LPU, p)

    @classmethod
    def cohen(cls, p) -> "ClassId":
        return cls(ClassKind.COHEN, p)

    @classmethod
    def mid(cls, p) -> "ClassId":
        return cls(ClassKind.MID, p)

    @classmethod
    def rad(cls) -> "ClassId":
        return cls(ClassKind.RAD)

    @classmethod
    def rad_sup(cls) -> "ClassId":
        return cls(ClassKind.RAD_SUP)

    @classmethod
    def dual(cls, inner) -> "ClassId":
        return cls(ClassKind.DUAL, inner=cls.coerce(inner))

    @classmethod
    def coerce(cls, value) -> "ClassId":
        if isinstance(value, ClassId):
            return value
        if isinstance(value, str):
            return cls.parse(value)
        raise ManifestError(f"Cannot interpret {value!r} as a sequence class")

    @classmethod
    def parse(cls, text: str) -> "ClassId":
        """Parse descriptors such as `lp:2`, `linf`, `lpw:4/3`, `rad`, `RAD`, `dual(lpu:2)`."""
        raw = text.strip()
        match = re.fullmatch(r"dual\s*\((.*)\)", raw, flags=re.IGNORECASE)
        if match:
            return cls.dual(cls.parse(match.group(1)))
        if raw == "RAD":
            return cls.rad_sup()
        name, sep, index = raw.partition(":")
        name = name.strip().lower()
        try:
            kind = ClassKind(name)
        except ValueError:
            raise ManifestError(f"Unknown sequence class {text!r}") from None
        if kind in (ClassKind.DUAL, ClassKind.RAD_SUP):
            raise ManifestError(f"Unknown sequence class {text!r}")
        if kind in INDEXED_KINDS:
            if not sep:
                raise ManifestError(f"Class {name} needs an index, e.g. {name}:2")
            return cls(kind, to_index(index))
        if sep:
            raise ManifestError(f"Class {name} takes no index")
        return cls(kind)

    def __str__(self):
        if self.kind is ClassKind.DUAL:
            return f"dual({self.inner})"
        if self.kind in INDEXED_KINDS:
            return f"{self.kind.value}:{format_index(self.p)}"
        return self.kind.value

    @property
    def depth(self) -> int:
        return 1 + self.inner.depth if self.kind is ClassKind.DUAL else 0

    def equivalent(self) -> "ClassId":
        """
        A class with the same norm on finite sequences, resolved through the
        closed-form dual identities. Returns a dual(...) class when none applies.
        """
        if self.kind is ClassKind.COHEN and self.p == 1:
            return ClassId.lp(1)
        if self.kind is not ClassKind.DUAL:
            return self
        inner = self.inner.equivalent()
        kind = inner.kind
        if kind is ClassKind.LP:
            return ClassId.linf() if inner.p == 1 else ClassId.lp(conjugate_index(inner.p))
        if kind in SUP_KINDS:
            return ClassId.lp(1)
        if kind in (ClassKind.LPW, ClassKind.LPU) and inner.p > 1:
            return ClassId.cohen(conjugate_index(inner.p)).equivalent()
        return ClassId.dual(inner)

    @property
    def has_closed_form(self) -> bool:
        return self.equivalent().kind is not ClassKind.DUAL

    @property
    def flags(self) -> ClassFlags:
        if self.kind is not ClassKind.DUAL:
            return BASE_FLAGS[self.kind]
        resolved = self.equivalent()
        if resolved.kind is not ClassKind.DUAL:
            return resolved.flags
        return ClassFlags(
            linearly_stable=self.inner.flags.linearly_stable,
            finitely_determined=True,
            spherically_complete=True,
        )

    @property
    def caveat(self) -> Optional[str]:
        if self.kind is ClassKind.DUAL:
            inner = self.inner.caveat
            return None if inner is None else f"{self}: {inner}"
        return CAVEATS.get(self.kind)


def ball_equivalent(seq_class: ClassId, space: Space) -> ClassId:
    """The class whose unit ball is used for optimisation over `space`-valued sequences."""
    return _collapse(ClassId.coerce(seq_class), space).equivalent()


def _collapse(seq_class: ClassId, space: Space) -> ClassId:
    if seq_class.kind is ClassKind.DUAL:
        return ClassId.dual(_collapse(seq_class.inner, space.dual))
    if space.dim == 1 and seq_class.kind in SCALAR_COLLAPSE_KINDS:
        return ClassId.lp(seq_class.p)
    if seq_class.kind is ClassKind.MID and seq_class.p == 2 and _is_hilbert(space):
        return ClassId.lp(2)
    return seq_class


def _is_hilbert(space: Space) -> bool:
    return isinstance(space.norm_spec, PNorm) and space.norm_spec.q == 2


def _rowwise_subgradients(space: Space, X: np.ndarray) -> np.ndarray:
    return np.array([space.subgradient(x) for x in X]).reshape(X.shape)


def pairing_objective(X: np.ndarray) -> ConvexObjective:
    """Phi -> sum_j |<phi_j, x_j>| on (k, n) arrays"""
    X = np.asarray(X, dtype=float)

    def evaluate(phi):
        s = np.sum(phi * X, axis=1)
        return float(np.abs(s).sum()), np.sign(s)[:, None] * X

    def batch(phis):
        return np.abs(np.sum(phis * X, axis=-1)).sum(axis=-1)

    return ConvexObjective(evaluate=evaluate, batch=batch)


def aligned_start(space: Space, X: np.ndarray) -> np.ndarray:
    """Unit norming functionals of each x_j, as a start for dual-side maximisation."""
    return _rowwise_subgradients(space, np.asarray(X, dtype=float))


def coordinate_start(space: Space, X: np.ndarray, length: Optional[int] = None) -> np.ndarray:
    """
    The norming functional of the largest x_j placed at coordinate j, or in row 0
    of a `length`-row array when `length` is given.
    """
    X = np.asarray(X, dtype=float)
    j = int(np.argmax(space.norms(X)))
    out = np.zeros((length or len(X), space.dim))
    out[j if length is None else 0] = space.subgradient(X[j])
    return out


def _lp_rule(seq_class, space, X, cfg):
    norms = space.norms(X)
    value = float(lp_norms(norms, seq_class.p))
    weights = lp_subgradient(norms, seq_class.p)
    norming = weights[:, None] * _rowwise_subgradients(space, X)
    return NormCert(value, VecSeq(space.dual, norming), EXACT, BOUND_EXACT, norming=norming)


def _sup_rule(seq_class, space, X, cfg):
    norms = space.norms(X)
    j = int(np.argmax(norms))
    norming = np.zeros_like(X)
    if norms[j] > 0:
        norming[j] = space.subgradient(X[j])
    return NormCert(float(norms[j]), VecSeq(space.dual, norming), EXACT, BOUND_EXACT, norming=norming,
                    details={"argmax": j + 1})


def weak_norm(X: np.ndarray, p, space: Space, cfg: OptConfig) -> NormCert:
    """sup over the dual unit ball of the ell_p norm of (<phi, x_j>)_j"""
    X = np.asarray(X, dtype=float)
    if space.dim == 1:
        return _lp_rule(ClassId.lp(p), space, X, cfg)
    if _is_hilbert(space) and p == 2 and cfg.method != "ascent":
        u, s, vt = np.linalg.svd(X, full_matrices=False)
        phi = vt[0]
        norming = np.outer(u[:, 0], phi) if s[0] > 0 else np.zeros_like(X)
        return NormCert(float(s[0]), phi, EXACT, BOUND_EXACT, norming=norming, details={"closed_form": "spectral"})

    objective = ConvexObjective(
        func=lambda phi: float(lp_norms(X @ phi, p)),
        subgradient=lambda phi: X.T @ lp_subgradient(X @ phi, p),
        batch=lambda phis: lp_norms(phis @ X.T, p),
    )
    cert = maximize_over_ball(objective, space.dual, cfg, starts=[coordinate_start(space, X, length=1)[0]])
    phi = np.asarray(cert.witness, dtype=float)
    cert.norming = np.outer(lp_subgradient(X @ phi, p), phi)
    return cert


def _weak_rule(seq_class, space, X, cfg):
    return weak_norm(X, seq_class.p, space, cfg)


def _cohen_rule(seq_class, space, X, cfg):
    p = seq_class.p
    if p == 1 or space.dim == 1:
        return _lp_rule(ClassId.lp(p), space, X, cfg)
    if _is_hilbert(space) and p == 2 and cfg.method != "ascent":
        u, s, vt = np.linalg.svd(X, full_matrices=False)
        norming = u @ vt
        return NormCert(float(s.sum()), VecSeq(space.dual, norming), EXACT, BOUND_EXACT, norming=norming,
                        details={"closed_form": "nuclear"})
    cert = maximize_over_seq_ball(
        pairing_objective(X), ClassId.weak(conjugate_index(p)), space.dual, len(X), cfg,
        starts=[aligned_start(space, X), coordinate_start(space, X)],
    )
    phi = cert.witness.vectors
    cert.norming = np.sign(np.sum(phi * X, axis=1))[:, None] * phi
    return cert


def _mid_objective(X: np.ndarray, p) -> ConvexObjective:
    def evaluate(phi):
        m = phi @ X.T
        return float(lp_norms(m.ravel(), p)), lp_subgradient(m, p) @ X

    return ConvexObjective(evaluate=evaluate)


def _mid_rule(seq_class, space, X, cfg):
    p = seq_class.p
    k = len(X)
    if space.dim == 1:
        return _lp_rule(ClassId.lp(p), space, X, cfg)
    if _is_hilbert(space) and p == 2 and cfg.method != "ascent":
        value = float(np.linalg.norm(X))
        norming = X / value if value > 0 else np.zeros_like(X)
        return NormCert(value, VecSeq(space.dual, np.eye(space.dim)), EXACT, BOUND_EXACT, norming=norming,
                        details={"closed_form": "frobenius", "m": space.dim})

    objective = _mid_objective(X, p)
    weak = ClassId.weak(p)
    m = k
    best = None
    increment = None
    while True:
        starts = [coordinate_start(space, X, length=m)]
        if best is not None:
            warm = np.zeros((m, space.dim))
            warm[: best.witness.length] = best.witness.vectors
            starts.append(warm)
        cert = maximize_over_seq_ball(objective, weak, space.dual, m, cfg, starts=starts)
        if best is not None:
            increment = (cert.value - best.value) / max(best.value, 1e-300)
        if best is None or cert.value > best.value:
            best = cert
        best.details.update({"m": m, "last_increment": increment})
        if increment is not None and increment < cfg.tol:
            break
        if m >= cfg.mid_max_m:
            break
        m = min(2 * m, cfg.mid_max_m)

    phi = best.witness.vectors
    best.norming = lp_subgradient(phi @ X.T, p).T @ phi
    logging.debug(f"mid:{format_index(p)} converged at m={best.details['m']}, increment {increment}")
    return best


def _sign_patterns(k: int) -> np.ndarray:
    # first sign fixed to +1; the norm is even
    if k == 1:
        return np.ones((1, 1))
    tail = np.array(list(product([1.0, -1.0], repeat=k - 1)))
    return np.hstack([np.ones((len(tail), 1)), tail])


def _rad_rule(seq_class, space, X, cfg):
    k = len(X)
    if k <= RAD_EXACT_MAX_LENGTH:
        signs = _sign_patterns(k)
        method, bound = EXACT, BOUND_EXACT
    elif cfg.rad_mc > 0:
        rng = np.random.default_rng([cfg.seed, k, 0x5AD])
        signs = rng.choice([-1.0, 1.0], size=(cfg.rad_mc, k))
        method, bound = MONTE_CARLO, ESTIMATE
        logging.warning(f"Rademacher average of length {k} estimated from {cfg.rad_mc} random sign patterns")
    else:
        raise UnsupportedComputationError(
            f"Exact Rademacher averages are limited to length {RAD_EXACT_MAX_LENGTH} (got {k}); "
            f"use --rad-mc N for a Monte-Carlo estimate"
        )
    sums = signs @ X
    norms = space.norms(sums)
    value = float(np.sqrt(np.mean(norms ** 2)))
    norming = np.zeros_like(X)
    if value > 0:
        grads = _rowwise_subgradients(space, sums)
        norming = (signs * norms[:, None]).T @ grads / (len(signs) * value)
    return NormCert(value, None, method, bound, norming=norming, details={"patterns": len(signs)})


def _rad_sup_rule(seq_class, space, X, cfg):
    best, best_m = None, 0
    for m in range(1, len(X) + 1):
        cert = _rad_rule(ClassId.rad(), space, X[:m], cfg)
        if best is None or cert.value > best.value:
            best, best_m = cert, m
    norming = np.zeros_like(X)
    norming[:best_m] = best.norming
    best.norming = norming
    best.details["prefix"] = best_m
    return best


_RULES = {
    ClassKind.LP: _lp_rule,
    ClassKind.LINF: _sup_rule,
    ClassKind.C0: _sup_rule,
    ClassKind.C0W: _sup_rule,
    ClassKind.LPW: _weak_rule,
    ClassKind.LPU: _weak_rule,
    ClassKind.COHEN: _cohen_rule,
    ClassKind.MID: _mid_rule,
    ClassKind.RAD: _rad_rule,
    ClassKind.RAD_SUP: _rad_sup_rule,
}


def norm_of_array(seq_class: ClassId, space: Space, X, cfg: OptConfig) -> NormCert:
    """Norm of a (k, dim) array under a non-dual class."""
    if seq_class.kind is ClassKind.DUAL:
        raise UnsupportedComputationError("Dual class norms are computed by dual_norm")
    return _RULES[seq_class.kind](seq_class, space, np.asarray(X, dtype=float), cfg)


def class_norm(seq_class, x: VecSeq, cfg: Optional[OptConfig] = None) -> NormCert:
    """Norm of the finite sequence x in the class X(E), E = x.space."""
    cfg = cfg or OptConfig()
    seq_class = ClassId.coerce(seq_class)
    if seq_class.kind is ClassKind.DUAL:
        raise UnsupportedComputationError(f"{seq_class} is a dual class; use dual_norm")
    if seq_class.caveat:
        logging.warning(seq_class.caveat)
    cert = norm_of_array(seq_class, x.space, x.vectors, cfg)
    cert.details.setdefault("class", str(seq_class))
    return cert


def prefix_norms(seq_class, x: VecSeq, cfg: Optional[OptConfig] = None) -> List[float]:
    """Norms of (x_1), (x_1, x_2), ..., (x_1, ..., x_k)"""
    cfg = cfg or OptConfig()
    seq_class = ClassId.coerce(seq_class)
    if seq_class.kind is ClassKind.DUAL:
        raise UnsupportedComputationError(f"{seq_class} is a dual class; use dual_norm on each prefix")
    return [norm_of_array(seq_class, x.space, x.vectors[:m], cfg).value for m in range(1, x.length + 1)]


def coordinate_axiom_check(seq_class, space: Space, v, j: int, cfg: Optional[OptConfig] = None,
                           length: Optional[int] = None):
    """(norm of v . e_j padded to `length`, norm of v); the coordinate axiom says they agree."""
    cfg = cfg or OptConfig()
    length = length or j
    x = VecSeq.coordinate(space, v, j, length)
    seq_class = ClassId.coerce(seq_class)
    if seq_class.kind is ClassKind.DUAL:
        from .dualize import sequence_norm

        lhs = sequence_norm(seq_class, space, x.vectors, cfg).value
    else:
        lhs = norm_of_array(seq_class, space, x.vectors, cfg).value
    return lhs, space.norm(v)
