"""
Maximisation of convex, positively homogeneous objectives over unit balls.

Three strategies, picked in this order unless a method is forced:
  - vertex enumeration when the ball is a polytope with a known vertex list (exact),
  - multistart ascent (lower bound),
  - a brute-force grid over the unit sphere for dimensions up to 3 (oracle).
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from itertools import product
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import OptimizeResult, approx_fprime

from .exceptions import DimensionMismatchError, MalformedObjectiveError, UnsupportedComputationError
from .space import INF, Space, conjugate_index, lp_subgradient

METHODS = ("auto", "exact", "ascent", "bruteforce")

# method tags
EXACT = "exact"
VERTEX_ENUM = "vertex-enum"
ASCENT = "ascent"
BRUTE_FORCE = "brute-force"
MONTE_CARLO = "monte-carlo"

# bound tags
BOUND_EXACT = "exact"
LOWER_BOUND = "lower-bound"
ESTIMATE = "estimate"

STALL_ITERATIONS = 10
MAX_BACKTRACK = 12
ORACLE_MAX_DIM = 3
SEQ_VERTEX_CAP = 4096
SEQ_COORDINATE_STARTS = 6
NESTED_RESTARTS = 2
# coarse sphere grid used to seed ball ascents in low dimension
SEED_GRID_RESOLUTION = 48
# ratio ascent runs at most max(RATIO_MIN_ITERATIONS, RATIO_ITERATIONS_PER_COORDINATE * k * n) steps
RATIO_MIN_ITERATIONS = 60
RATIO_ITERATIONS_PER_COORDINATE = 20


@dataclass(frozen=True)
class OptConfig:
    """Optimiser settings. `method` applies to the outermost computation only."""

    seed: int = 0
    restarts: int = 4
    max_iter: int = 200
    tol: float = 1e-7
    grid_resolution: int = 360
    mid_max_m: int = 64
    rad_mc: int = 0
    method: str = "auto"
    workers: int = 1

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError(f"tol must be positive, got {self.tol}")
        if self.restarts < 1:
            raise ValueError(f"restarts must be at least 1, got {self.restarts}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be at least 1, got {self.max_iter}")
        if self.grid_resolution < 2:
            raise ValueError(f"grid resolution must be at least 2, got {self.grid_resolution}")
        if self.mid_max_m < 1 or self.rad_mc < 0 or self.workers < 1:
            raise ValueError("mid_max_m and workers must be positive, rad_mc non-negative")
        if self.method not in METHODS:
            raise ValueError(f"Unknown method {self.method!r}; expected one of {', '.join(METHODS)}")

    def nested(self) -> "OptConfig":
        """Configuration for inner computations: automatic method selection, at most NESTED_RESTARTS restarts."""
        restarts = min(self.restarts, NESTED_RESTARTS)
        if self.method == "auto" and self.restarts == restarts:
            return self
        return replace(self, method="auto", restarts=restarts)

    def as_dict(self) -> Dict:
        return asdict(self)

    @classmethod
    def from_settings(cls, engine_settings: Dict, **overrides) -> "OptConfig":
        """Build from a SUMMING_ENGINE style mapping; `None` overrides are ignored."""
        keys = {
            "SEED": "seed",
            "RESTARTS": "restarts",
            "MAX_ITER": "max_iter",
            "TOL": "tol",
            "GRID": "grid_resolution",
            "MID_MAX_M": "mid_max_m",
            "RAD_MC": "rad_mc",
            "METHOD": "method",
            "WORKERS": "workers",
        }
        values = {keys[k]: v for k, v in (engine_settings or {}).items() if k in keys}
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


@dataclass
class NormCert:
    """
    A computed supremum together with the argument that attains it.

    `norming` is a subgradient of the computed norm at the input (used by nested
    ascents); it is not part of the serialised certificate.
    """

    value: float
    witness: Any = None
    method: str = EXACT
    bound: str = BOUND_EXACT
    norming: Any = field(default=None, repr=False, compare=False)
    details: Dict[str, Any] = field(default_factory=dict)

    @property
    def is_exact(self) -> bool:
        return self.bound == BOUND_EXACT

    def to_dict(self, include_witness: bool = False) -> Dict:
        out = {
            "value": float(self.value),
            "method": self.method,
            "bound": self.bound,
            "details": dict(self.details),
        }
        if include_witness:
            witness = getattr(self.witness, "vectors", self.witness)
            out["witness"] = None if witness is None else np.asarray(witness, dtype=float).tolist()
        return out


class ConvexObjective:
    """
    A convex objective with a subgradient oracle.

    `evaluate` returns (value, subgradient). Without an explicit oracle the
    subgradient is a forward-difference estimate from scipy.
    """

    def __init__(
        self,
        func: Optional[Callable] = None,
        subgradient: Optional[Callable] = None,
        batch: Optional[Callable] = None,
        evaluate: Optional[Callable] = None,
    ):
        if func is None and evaluate is None:
            raise ValueError("An objective needs either a value function or an evaluate function")
        self._func = func
        self._subgradient = subgradient
        self._batch = batch
        self._evaluate = evaluate

    def __call__(self, v) -> float:
        v = np.asarray(v, dtype=float)
        value = self._func(v) if self._func is not None else self._evaluate(v)[0]
        return _finite(value)

    def evaluate(self, v) -> Tuple[float, np.ndarray]:
        v = np.asarray(v, dtype=float)
        if self._evaluate is not None:
            value, grad = self._evaluate(v)
            return _finite(value), np.asarray(grad, dtype=float)
        value = self(v)
        if self._subgradient is not None:
            return value, np.asarray(self._subgradient(v), dtype=float)
        flat = v.ravel()
        grad = approx_fprime(flat, lambda z: float(self._func(z.reshape(v.shape))), 1e-7)
        return value, grad.reshape(v.shape)

    def values(self, points) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        if self._batch is not None:
            values = np.asarray(self._batch(points), dtype=float)
        else:
            values = np.array([self(p) for p in points], dtype=float)
        if not np.all(np.isfinite(values)):
            raise MalformedObjectiveError("Objective returned a non-finite value on the vertex set")
        return values


def _finite(value) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise MalformedObjectiveError(f"Objective returned a non-finite value ({value})")
    return value


def as_objective(objective) -> ConvexObjective:
    if isinstance(objective, ConvexObjective):
        return objective
    if callable(objective):
        return ConvexObjective(objective)
    raise TypeError(f"Expected a callable objective, got {type(objective).__name__}")


def map_ordered(fn: Callable, items: Sequence, workers: int = 1) -> List:
    """Map preserving input order; threads when workers > 1."""
    if workers > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, items))
    return [fn(item) for item in items]


def _best_run(runs: List[Tuple[float, Any, int]]) -> Tuple[int, Tuple[float, Any, int]]:
    best_index = 0
    for i, run in enumerate(runs):
        if run[0] > runs[best_index][0]:
            best_index = i
    return best_index, runs[best_index]


def conditional_gradient_ascent(objective: ConvexObjective, support: Callable, start, cfg: OptConfig):
    """
    Ascent with a linear maximisation oracle: move to the ball point best aligned
    with the current subgradient. Monotone for convex objectives.
    `start` must already lie on the unit sphere. Returns (value, point, iterations).
    """
    v = np.asarray(start, dtype=float)
    value, g = objective.evaluate(v)
    stall = 0
    iterations = 0
    for iterations in range(1, cfg.max_iter + 1):
        if not np.any(g):
            break
        u = support(g)
        if u is None:
            break
        new_value, new_g = objective.evaluate(u)
        if new_value <= value:
            # fixed point: the next step would repeat this one
            break
        gain = (new_value - value) / max(abs(value), 1e-300)
        v, value, g = u, new_value, new_g
        stall = stall + 1 if gain < cfg.tol else 0
        if stall >= STALL_ITERATIONS:
            break
    return value, v, iterations


def ratio_ascent(objective: ConvexObjective, norm_of: Callable, start, cfg: OptConfig):
    """
    Maximise f(Z)/N(Z) for a convex f and a norm N without a linear oracle.

    Steps along D = grad f - f * grad N (the gradient of the ratio on N = 1),
    backtracking on failure, and rescales every iterate onto the unit sphere.
    `norm_of(Z)` must return a NormCert carrying a norming subgradient.
    """
    cert = norm_of(start)
    if cert.value <= 0:
        return -math.inf, np.asarray(start, dtype=float), 0
    z = np.asarray(start, dtype=float) / cert.value
    h = np.asarray(cert.norming, dtype=float)
    value, g = objective.evaluate(z)
    step = 0.5
    stall = 0
    iterations = 0
    budget = min(cfg.max_iter, max(RATIO_MIN_ITERATIONS, RATIO_ITERATIONS_PER_COORDINATE * z.size))
    for iterations in range(1, budget + 1):
        direction = g - value * h
        d_size = np.linalg.norm(direction)
        if d_size <= 1e-14 * max(np.linalg.norm(g), 1e-300):
            break
        scale = np.linalg.norm(z) / d_size
        accepted = False
        for _ in range(MAX_BACKTRACK):
            trial = z + step * scale * direction
            trial_cert = norm_of(trial)
            if trial_cert.value > 0:
                t = trial / trial_cert.value
                t_value, t_grad = objective.evaluate(t)
                if t_value > value:
                    gain = (t_value - value) / max(abs(value), 1e-300)
                    z, value, g, h = t, t_value, t_grad, np.asarray(trial_cert.norming, dtype=float)
                    step = min(step * 1.5, 4.0)
                    stall = stall + 1 if gain < cfg.tol else 0
                    accepted = True
                    break
            step *= 0.5
        if not accepted or stall >= STALL_ITERATIONS:
            break
    return value, z, iterations


def _grid_starts(objective: ConvexObjective, space: Space, count: int) -> List[np.ndarray]:
    """The best `count` points of a coarse sphere grid, one per +-pair."""
    points = sphere_grid(space, SEED_GRID_RESOLUTION)
    order = np.argsort(-objective.values(points), kind="stable")
    starts: List[np.ndarray] = []
    for i in order:
        u = points[i]
        if any(np.allclose(u, s) or np.allclose(u, -s) for s in starts):
            continue
        starts.append(u)
        if len(starts) == count:
            break
    return starts


def _ball_starts(space: Space, cfg: OptConfig, include_vertices: bool,
                 objective: Optional[ConvexObjective] = None) -> List[np.ndarray]:
    points = space.extreme_points() if include_vertices else None
    if points is None and objective is not None and 1 < space.dim <= ORACLE_MAX_DIM:
        return _grid_starts(objective, space, cfg.restarts)
    starts = []
    for r in range(cfg.restarts):
        rng = np.random.default_rng([cfg.seed, r])
        v = rng.standard_normal(space.dim)
        if not np.any(v):
            v[0] = 1.0
        starts.append(v / space.norm(v))
    if points is not None:
        starts.extend(points)
    return starts


def maximize_over_ball(objective, ball_space: Space, cfg: Optional[OptConfig] = None,
                       starts: Optional[List[np.ndarray]] = None) -> NormCert:
    """
    Maximise a convex, positively homogeneous objective over the unit ball of ball_space.
    Extra `starts` are rescaled onto the unit sphere and tried after the seeded ones.
    """
    cfg = cfg or OptConfig()
    objective = as_objective(objective)

    if cfg.method == "bruteforce":
        result = grid_search(objective, ball_space, cfg.grid_resolution)
        return NormCert(
            result.fun, result.x, BRUTE_FORCE, LOWER_BOUND,
            details={"evaluations": result.nfev, "band": result.band},
        )

    points = ball_space.extreme_points()
    if points is not None and cfg.method != "ascent":
        values = objective.values(points)
        best = int(np.argmax(values))
        return NormCert(
            float(values[best]), points[best].copy(), VERTEX_ENUM, BOUND_EXACT,
            details={"vertices": len(points)},
        )
    if cfg.method == "exact":
        raise UnsupportedComputationError(f"No exact maximiser over the unit ball of {ball_space}")

    extra = [np.asarray(s, dtype=float) for s in (starts or []) if np.any(s)]
    starts = _ball_starts(ball_space, cfg, include_vertices=True, objective=objective)
    starts += [s / ball_space.norm(s) for s in extra]
    runs = map_ordered(
        lambda v0: conditional_gradient_ascent(objective, ball_space.support_point, v0, cfg),
        starts,
        cfg.workers,
    )
    index, (value, v, iterations) = _best_run(runs)
    logging.debug(f"Ball ascent on {ball_space}: best start {index}/{len(starts)}, value {value:.12g}")
    return NormCert(
        float(value), np.asarray(v, dtype=float), ASCENT, LOWER_BOUND,
        details={"starts": len(starts), "best_start": index, "iterations": iterations},
    )


def maximize_over_seq_ball(
    objective,
    seq_class,
    space: Space,
    length: int,
    cfg: Optional[OptConfig] = None,
    starts: Optional[List[np.ndarray]] = None,
) -> NormCert:
    """
    Maximise a convex objective on (length x dim) arrays over the unit ball of a
    sequence-class norm on space-valued sequences.

    Extra `starts` (arrays of shape (length, dim)) are tried after the seeded ones.
    """
    from .dualize import sequence_norm
    from .seqnorm import ClassId, ClassKind, VecSeq, ball_equivalent

    cfg = cfg or OptConfig()
    objective = as_objective(objective)
    seq_class = ClassId.coerce(seq_class)
    k, n = int(length), space.dim
    if k < 1:
        raise DimensionMismatchError(f"Sequence length must be positive, got {length}")
    inner_cfg = cfg.nested()
    ball = ball_equivalent(seq_class, space)

    if cfg.method == "bruteforce":
        seq_ball = SequenceBall(seq_class, space, k, inner_cfg)
        flat = ConvexObjective(lambda v: objective(v.reshape(k, n)))
        result = grid_search(flat, seq_ball, cfg.grid_resolution)
        return NormCert(
            result.fun, VecSeq(space, result.x.reshape(k, n)), BRUTE_FORCE, LOWER_BOUND,
            details={"evaluations": result.nfev, "band": result.band},
        )

    vertices = _seq_ball_vertices(ball, space, k, ClassKind)
    if vertices is not None and cfg.method != "ascent":
        values = objective.values(vertices)
        best = int(np.argmax(values))
        return NormCert(
            float(values[best]), VecSeq(space, vertices[best]), VERTEX_ENUM, BOUND_EXACT,
            details={"vertices": len(vertices), "ball": str(ball)},
        )
    if cfg.method == "exact":
        raise UnsupportedComputationError(f"No exact maximiser over the unit ball of {seq_class} on {space}")

    def norm_of(z):
        return sequence_norm(seq_class, space, z, inner_cfg)

    seeds = _seq_starts(space, k, cfg) + [np.asarray(s, dtype=float) for s in (starts or []) if np.any(s)]
    support = _seq_ball_support(ball, space, ClassKind)
    if support is not None:
        def run(z0):
            return conditional_gradient_ascent(objective, support, z0 / norm_of(z0).value, cfg)
        strategy = "linear-oracle"
    else:
        def run(z0):
            return ratio_ascent(objective, norm_of, z0, cfg)
        strategy = "ratio"

    runs = map_ordered(run, seeds, cfg.workers)
    index, (value, z, iterations) = _best_run(runs)
    z = np.asarray(z, dtype=float)
    value = objective(z)
    logging.debug(
        f"Sequence-ball ascent ({strategy}) over {seq_class} on {space}, k={k}: "
        f"best start {index}/{len(seeds)}, value {value:.12g}"
    )
    return NormCert(
        float(value), VecSeq(space, z), ASCENT, LOWER_BOUND,
        details={"starts": len(seeds), "best_start": index, "iterations": iterations, "strategy": strategy},
    )


def _seq_starts(space: Space, k: int, cfg: OptConfig) -> List[np.ndarray]:
    n = space.dim
    starts = []
    for r in range(cfg.restarts):
        rng = np.random.default_rng([cfg.seed, r])
        z = rng.standard_normal((k, n))
        if not np.any(z):
            z[0, 0] = 1.0
        starts.append(z)
    points = space.extreme_points()
    if points is not None:
        # one representative per +-pair; objectives here are even
        reps = [u for u in points if u[np.flatnonzero(u)[0]] > 0]
        candidates = []
        for u in reps:
            candidates.append(np.tile(u, (k, 1)))
            for j in range(k):
                z = np.zeros((k, n))
                z[j] = u
                candidates.append(z)
        starts.extend(candidates[:SEQ_COORDINATE_STARTS])
    return starts


def _seq_ball_vertices(ball, space: Space, k: int, kinds) -> Optional[np.ndarray]:
    """Extreme points of polyhedral sequence balls: ell_1 and sup-norm types over polytope spaces."""
    points = space.extreme_points()
    if points is None:
        return None
    m, n = points.shape
    if ball.kind is kinds.LP and ball.p == 1:
        out = np.zeros((k * m, k, n))
        for j in range(k):
            out[j * m:(j + 1) * m, j, :] = points
        return out
    if ball.kind in (kinds.LINF, kinds.C0, kinds.C0W):
        if m ** k > SEQ_VERTEX_CAP:
            return None
        idx = np.array(list(product(range(m), repeat=k)))
        return points[idx]
    return None


def _seq_ball_support(ball, space: Space, kinds) -> Optional[Callable]:
    """Linear maximisation oracle for ell_p(E) and sup-norm balls."""
    if ball.kind is kinds.LP:
        p = ball.p
    elif ball.kind in (kinds.LINF, kinds.C0, kinds.C0W):
        p = INF
    else:
        return None
    dual = space.dual

    def support(g):
        g = np.asarray(g, dtype=float)
        weights = lp_subgradient(dual.norms(g), conjugate_index(p))
        if not np.any(weights):
            return None
        z = np.zeros_like(g)
        for j, t in enumerate(weights):
            if t != 0:
                z[j] = t * space.support_point(g[j])
        return z

    return support


class SequenceBall:
    """Unit ball of a sequence-class norm viewed as a ball in R^(k*n), for the grid oracle"""

    def __init__(self, seq_class, space: Space, length: int, cfg: OptConfig):
        from .dualize import sequence_norm

        self._norm = sequence_norm
        self.seq_class = seq_class
        self.space = space
        self.length = length
        self.cfg = cfg
        self.dim = length * space.dim

    def norms(self, points) -> np.ndarray:
        shape = (self.length, self.space.dim)
        points = np.asarray(points, dtype=float)
        return np.array([self._norm(self.seq_class, self.space, p.reshape(shape), self.cfg).value for p in points])

    def sign_radius(self) -> float:
        return float(self.norms(np.array(list(product([1.0, -1.0], repeat=self.dim)))).max())

    def linf_radius(self) -> float:
        # every class norm dominates the largest coordinate norm
        return self.space.linf_radius()

    def __repr__(self):
        return f"SequenceBall({self.seq_class}, {self.space}, k={self.length})"


def _face_ticks(resolution: int) -> int:
    # four cube edges make one turn of the circle in dimension 2
    return max(2, -(-int(resolution) // 4) + 1)


def sphere_grid(ball, resolution: int) -> np.ndarray:
    """
    Deterministic sample of the unit sphere of `ball`: the surface of the cube
    [-1, 1]^n on a regular grid (cube vertices included), radially rescaled.
    """
    n = ball.dim
    if n > ORACLE_MAX_DIM:
        raise UnsupportedComputationError(f"Brute-force oracle supports dimension <= {ORACLE_MAX_DIM}, got {n}")
    if n == 1:
        cube = np.array([[1.0], [-1.0]])
    else:
        ticks = np.linspace(-1.0, 1.0, _face_ticks(resolution))
        face_grid = np.array(list(product(ticks, repeat=n - 1)))
        faces = [np.insert(face_grid, axis, sign, axis=1) for axis in range(n) for sign in (1.0, -1.0)]
        cube = np.vstack(faces)
    return cube / np.asarray(ball.norms(cube), dtype=float)[:, None]


def discretization_band(ball, resolution: int) -> float:
    """
    Relative grid error h: for sublinear objectives the true supremum lies in
    [brute, brute * (1 + h) / (1 - h)].
    """
    if ball.dim == 1:
        return 0.0
    spacing = 1.0 / (_face_ticks(resolution) - 1)
    return ball.sign_radius() * ball.linf_radius() * spacing


def oracle_upper(brute_value: float, band: float) -> float:
    if band >= 1:
        return math.inf
    return brute_value * (1 + band) / (1 - band)


def grid_search(objective, ball, resolution: int) -> OptimizeResult:
    objective = as_objective(objective)
    points = sphere_grid(ball, resolution)
    values = objective.values(points)
    best = int(np.argmax(values))
    return OptimizeResult(
        x=points[best],
        fun=float(values[best]),
        nfev=len(points),
        success=True,
        band=discretization_band(ball, resolution),
    )


def brute_force_sup(objective, ball_space, resolution: int) -> float:
    """Independent oracle: best objective value on a dense deterministic sample of the unit sphere."""
    return grid_search(objective, ball_space, resolution).fun
