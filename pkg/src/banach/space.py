"""
Finite-dimensional real Banach spaces.

A Space couples a dimension with a norm specification. Every specification
knows its dual specification, a norming functional (subgradient) for each
vector and, when the unit ball is a polytope, its extreme points.
"""
import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import product
from typing import Dict, Optional, Tuple, Union

import numpy as np
from scipy.spatial import ConvexHull

from .exceptions import DimensionMismatchError, IndexRangeError, InvalidSpaceError

INF = math.inf
POLYTOPE_MAX_DIM = 6

Index = Union[Fraction, float]


def to_index(value) -> Index:
    """Parse an index p in [1, inf]: ints, floats, Fractions and strings like "4/3" or "inf"."""
    if isinstance(value, str):
        text = value.strip().lower()
        if text in ("inf", "+inf", "infinity", "∞"):
            return INF
        try:
            p = Fraction(text)
        except (ValueError, ZeroDivisionError) as e:
            raise IndexRangeError(f"Cannot parse index {value!r}") from e
    elif isinstance(value, Fraction):
        p = value
    elif isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        p = Fraction(int(value))
    elif isinstance(value, (float, np.floating)):
        if value == INF:
            return INF
        if not math.isfinite(value):
            raise IndexRangeError(f"Index {value!r} is not a number in [1, inf]")
        p = Fraction(float(value)).limit_denominator(10**6)
    else:
        raise IndexRangeError(f"Cannot interpret {value!r} as an index")
    if p < 1:
        raise IndexRangeError(f"Index {p} is outside [1, inf]")
    return p


def conjugate_index(p) -> Index:
    """Return p* with 1/p + 1/p* = 1 (1 <-> inf)"""
    p = to_index(p)
    if p == INF:
        return Fraction(1)
    if p == 1:
        return INF
    return p / (p - 1)


def format_index(p) -> str:
    p = to_index(p)
    return "inf" if p == INF else str(p)


def lp_norms(points, q) -> np.ndarray:
    """ell_q norms along the last axis."""
    a = np.abs(np.asarray(points, dtype=float))
    if q == INF:
        return a.max(axis=-1)
    if q == 1:
        return a.sum(axis=-1)
    qf = float(q)
    if qf == 2.0:
        return np.sqrt(np.sum(a * a, axis=-1))
    # scale by the largest entry so that high powers stay finite
    scale = a.max(axis=-1, keepdims=True)
    safe = np.where(scale > 0, scale, 1.0)
    return safe[..., 0] * np.sum((a / safe) ** qf, axis=-1) ** (1.0 / qf)


def lp_subgradient(v, q) -> np.ndarray:
    """
    Norming functional of v for the ell_q norm: unit in ell_q*, pairs with v to ||v||_q.
    The zero vector maps to the zero functional.
    """
    v = np.asarray(v, dtype=float)
    g = np.zeros_like(v)
    a = np.abs(v)
    top = a.max() if a.size else 0.0
    if top == 0:
        return g
    if q == INF:
        i = int(np.argmax(a))
        g.flat[i] = np.sign(v.flat[i])
        return g
    if q == 1:
        return np.sign(v)
    w = (a / top) ** (float(q) - 1.0)
    w = w / lp_norms(w.ravel(), conjugate_index(q))
    return np.sign(v) * w


def _sign_vectors(dim: int) -> np.ndarray:
    return np.array(list(product([1.0, -1.0], repeat=dim)))


def _unique_rows(rows: np.ndarray) -> np.ndarray:
    _, idx = np.unique(np.round(rows, 10), axis=0, return_index=True)
    return rows[np.sort(idx)]


class NormSpec(ABC):
    """A norm on R^n given by a closed-form rule"""

    @abstractmethod
    def norms(self, points: np.ndarray) -> np.ndarray:
        """Norms along the last axis of points"""

    @abstractmethod
    def subgradient(self, v: np.ndarray) -> np.ndarray:
        """A dual-unit functional g with <g, v> = ||v|| (0 at v = 0)"""

    @abstractmethod
    def dual(self) -> "NormSpec":
        pass

    @abstractmethod
    def key(self) -> tuple:
        pass

    @abstractmethod
    def describe(self) -> Dict:
        pass

    def extreme_points(self, dim: int) -> Optional[np.ndarray]:
        return None

    def check_dim(self, dim: int) -> None:
        pass


@dataclass(frozen=True)
class PNorm(NormSpec):
    q: Index = 2

    def __post_init__(self):
        object.__setattr__(self, "q", to_index(self.q))

    def norms(self, points):
        return lp_norms(points, self.q)

    def subgradient(self, v):
        return lp_subgradient(v, self.q)

    def dual(self):
        return PNorm(conjugate_index(self.q))

    def extreme_points(self, dim):
        if self.q == 1:
            eye = np.eye(dim)
            return np.vstack([eye, -eye])
        if self.q == INF:
            return _sign_vectors(dim)
        return None

    def key(self):
        return ("p", format_index(self.q))

    def describe(self):
        return {"p": format_index(self.q)}

    def __str__(self):
        return f"PNorm({format_index(self.q)})"


@dataclass(frozen=True)
class WeightedPNorm(NormSpec):
    """||v|| = ||w * v||_q for positive weights w"""

    q: Index
    weights: Tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "q", to_index(self.q))
        weights = tuple(float(w) for w in self.weights)
        if not weights or min(weights) <= 0 or not all(math.isfinite(w) for w in weights):
            raise InvalidSpaceError("Weights must be finite and strictly positive")
        object.__setattr__(self, "weights", weights)

    @property
    def w(self) -> np.ndarray:
        return np.array(self.weights)

    def check_dim(self, dim):
        if len(self.weights) != dim:
            raise DimensionMismatchError(f"{len(self.weights)} weights given for dimension {dim}")

    def norms(self, points):
        return lp_norms(np.asarray(points, dtype=float) * self.w, self.q)

    def subgradient(self, v):
        return self.w * lp_subgradient(self.w * np.asarray(v, dtype=float), self.q)

    def dual(self):
        return WeightedPNorm(conjugate_index(self.q), tuple(1.0 / w for w in self.weights))

    def extreme_points(self, dim):
        base = PNorm(self.q).extreme_points(dim)
        return None if base is None else base / self.w

    def key(self):
        return ("wp", format_index(self.q), self.weights)

    def describe(self):
        return {"p": format_index(self.q), "weights": list(self.weights)}

    def __str__(self):
        return f"WeightedPNorm({format_index(self.q)})"


@dataclass(frozen=True, eq=False)
class Polytope(NormSpec):
    """
    Gauge of a symmetric polytope, stored both as vertices and as facets {x : a.x <= 1}.
    The dual norm is the support function, i.e. the polytope with the two lists swapped.
    """

    vertices: np.ndarray
    facets: np.ndarray = field(repr=False)

    @classmethod
    def from_vertices(cls, points) -> "Polytope":
        pts = np.asarray(points, dtype=float)
        if pts.ndim != 2 or pts.shape[0] == 0:
            raise InvalidSpaceError("Polytope vertices must be a non-empty list of vectors")
        n = pts.shape[1]
        if n > POLYTOPE_MAX_DIM:
            raise InvalidSpaceError(f"Polytope spaces are limited to dimension {POLYTOPE_MAX_DIM}, got {n}")
        if not np.all(np.isfinite(pts)):
            raise InvalidSpaceError("Polytope vertices must be finite")
        gaps = np.abs(pts[:, None, :] + pts[None, :, :]).max(axis=-1).min(axis=1)
        if np.any(gaps > 1e-9 * max(1.0, np.abs(pts).max())):
            raise InvalidSpaceError("Polytope vertex list is not symmetric (v listed without -v)")
        if np.linalg.matrix_rank(pts) < n:
            raise InvalidSpaceError("Polytope vertices do not span the space")
        if n == 1:
            r = float(np.abs(pts).max())
            return cls(np.array([[r], [-r]]), np.array([[1.0 / r], [-1.0 / r]]))

        hull = ConvexHull(pts)
        normals = hull.equations[:, :-1]
        offsets = hull.equations[:, -1]
        facets = _unique_rows(normals / (-offsets)[:, None])
        vertices = _unique_rows(pts[hull.vertices])
        logging.debug(f"Polytope hull: {len(vertices)} vertices, {len(facets)} facets")
        return cls(vertices, facets)

    def check_dim(self, dim):
        if self.vertices.shape[1] != dim:
            raise DimensionMismatchError(
                f"Polytope vertices have dimension {self.vertices.shape[1]}, space has {dim}"
            )

    def norms(self, points):
        values = np.asarray(points, dtype=float) @ self.facets.T
        return np.maximum(values.max(axis=-1), 0.0)

    def subgradient(self, v):
        v = np.asarray(v, dtype=float)
        if not np.any(v):
            return np.zeros_like(v)
        return self.facets[int(np.argmax(self.facets @ v))].copy()

    def dual(self):
        return Polytope(self.facets, self.vertices)

    def extreme_points(self, dim):
        return self.vertices.copy()

    def key(self):
        rows = np.round(self.vertices, 9) + 0.0
        rows = rows[np.lexsort(rows.T[::-1])]
        return ("polytope", rows.shape, rows.tobytes())

    def describe(self):
        return {"polytope": self.vertices.tolist()}

    def __str__(self):
        return f"Polytope[{len(self.vertices)} vertices]"


@dataclass(frozen=True, eq=False)
class Space:
    """A finite-dimensional real Banach space. Immutable; safe to share across threads."""

    dim: int
    norm_spec: NormSpec

    def __post_init__(self):
        if isinstance(self.dim, bool) or int(self.dim) != self.dim or self.dim < 1:
            raise InvalidSpaceError(f"Space dimension must be a positive integer, got {self.dim!r}")
        object.__setattr__(self, "dim", int(self.dim))
        self.norm_spec.check_dim(self.dim)

    @classmethod
    def pnorm(cls, dim: int, q=2) -> "Space":
        return cls(dim, PNorm(q))

    @classmethod
    def weighted(cls, q, weights) -> "Space":
        weights = tuple(weights)
        return cls(len(weights), WeightedPNorm(q, weights))

    @classmethod
    def polytope(cls, vertices) -> "Space":
        spec = Polytope.from_vertices(vertices)
        return cls(spec.vertices.shape[1], spec)

    @property
    def key(self) -> tuple:
        return (self.dim, self.norm_spec.key())

    def __eq__(self, other):
        return isinstance(other, Space) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return f"Space({self.norm_spec}, dim={self.dim})"

    def check_vector(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        if v.ndim == 0 or v.shape[-1] != self.dim:
            raise DimensionMismatchError(f"Expected vectors of dimension {self.dim}, got shape {v.shape}")
        return v

    def norm(self, v) -> float:
        v = self.check_vector(v)
        if v.ndim != 1:
            raise DimensionMismatchError(f"norm() takes a single vector, got shape {v.shape}")
        return float(self.norm_spec.norms(v))

    def norms(self, points) -> np.ndarray:
        return np.asarray(self.norm_spec.norms(self.check_vector(points)), dtype=float)

    def subgradient(self, v) -> np.ndarray:
        return self.norm_spec.subgradient(self.check_vector(v))

    @cached_property
    def dual(self) -> "Space":
        dual = Space(self.dim, self.norm_spec.dual())
        # the bidual is this very object
        dual.__dict__["dual"] = self
        return dual

    def support_point(self, g) -> np.ndarray:
        """A unit vector v maximising <g, v>."""
        g = self.check_vector(g)
        if not np.any(g):
            e = np.zeros(self.dim)
            e[0] = 1.0
            return e / self.norm(e)
        return self.dual.subgradient(g)

    def extreme_points(self) -> Optional[np.ndarray]:
        if self.dim == 1:
            r = 1.0 / self.norm(np.ones(1))
            return np.array([[r], [-r]])
        return self.norm_spec.extreme_points(self.dim)

    def linf_radius(self) -> float:
        """Largest sup-norm of a point of the unit ball"""
        return float(self.dual.norms(np.eye(self.dim)).max())

    def sign_radius(self) -> float:
        """Largest norm of a vertex of the unit cube"""
        return float(self.norms(_sign_vectors(self.dim)).max())

    def describe(self) -> Dict:
        return {"dim": self.dim, "norm": self.norm_spec.describe()}


def norm(space: Space, v) -> float:
    return space.norm(v)


def dual_space(space: Space) -> Space:
    return space.dual


def extreme_points(space: Space) -> Optional[np.ndarray]:
    """Extreme points of the unit ball, or None when the ball has no finite vertex set"""
    return space.extreme_points()
