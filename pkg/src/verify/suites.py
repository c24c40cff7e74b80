"""
Registry of property suites. Each suite draws seeded random instances, runs the
engine on them and turns the expected identities and inequalities into Checks.

Trial i of a run with seed s draws everything from default_rng([s, i]), so a
SuiteSpec fully determines its SuiteReport.
"""
import logging
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from banach.dualize import (
    DualNormProblem,
    bidual_gap,
    coordinate_functionals,
    dual_norm,
    functional_norm_as_dual_element,
    mid_sandwich,
    pairing_apply,
    sequence_norm,
    sup_equality_check,
)
from banach.exceptions import UnknownSuiteError, UnsupportedComputationError
from banach.opideal import (
    LinOp,
    adjoint,
    adjoint_duality_report,
    apply_elementwise,
    ideal_property_check,
    injectivity_probe,
    reverse_duality_report,
    second_adjoint_check,
    summing_norm,
)
from banach.optimize import (
    ORACLE_MAX_DIM,
    ConvexObjective,
    OptConfig,
    brute_force_sup,
    discretization_band,
    map_ordered,
    maximize_over_ball,
    maximize_over_seq_ball,
    oracle_upper,
)
from banach.seqnorm import (
    ClassId,
    ClassKind,
    VecSeq,
    ball_equivalent,
    class_norm,
    coordinate_axiom_check,
    pairing_objective,
    prefix_norms,
)
from banach.space import Space, conjugate_index, dual_space, extreme_points, format_index, lp_norms, norm, to_index

from .instances import (
    CURVED_FAMILIES,
    INDICES,
    SMOOTH_FAMILIES,
    VERTEX_FAMILIES,
    choose,
    default_classes,
    describe_sequence,
    random_index,
    random_operator,
    random_sequence,
    random_space,
)
from .report import EQUAL, LESS_EQUAL, Check, SuiteReport, TrialResult

PUBLIC_OPERATIONS = (
    "norm",
    "dual_space",
    "conjugate_index",
    "extreme_points",
    "maximize_over_ball",
    "brute_force_sup",
    "maximize_over_seq_ball",
    "class_norm",
    "prefix_norms",
    "coordinate_axiom_check",
    "dual_norm",
    "sup_equality_check",
    "pairing_apply",
    "functional_norm_as_dual_element",
    "coordinate_functionals",
    "bidual_gap",
    "adjoint",
    "apply_elementwise",
    "summing_norm",
    "adjoint_duality_report",
    "reverse_duality_report",
    "second_adjoint_check",
)

DEFAULT_TOLERANCES = {"exact": 1e-9, "ascent": 1e-3}
ORACLE_MAX_LENGTH = 4
ORACLE_RESTARTS = 8
# grid resolution for brackets whose points each cost a nested norm
NESTED_BRACKET_RESOLUTION = 96


@dataclass
class SuiteSpec:
    """What to run. Empty dims/lengths/classes and trials=None fall back to the suite defaults."""

    name: str
    trials: Optional[int] = None
    seed: int = 0
    dims: Tuple[int, ...] = ()
    lengths: Tuple[int, ...] = ()
    classes: Tuple[ClassId, ...] = ()
    tolerances: Dict[str, float] = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    config: OptConfig = field(default_factory=OptConfig)

    def as_dict(self) -> Dict:
        return {
            "name": self.name,
            "trials": self.trials,
            "seed": self.seed,
            "dims": list(self.dims),
            "lengths": list(self.lengths),
            "classes": [str(c) for c in self.classes],
            "tolerances": dict(self.tolerances),
            "config": self.config.as_dict(),
        }


@dataclass(frozen=True)
class Suite:
    name: str
    run: Callable[["TrialContext"], List[Check]]
    covers: Tuple[str, ...]
    description: str
    trials: int = 20
    dims: Tuple[int, ...] = (1, 2, 3)
    lengths: Tuple[int, ...] = (1, 2, 3)
    uses_oracle: bool = False

    def resolve(self, spec: SuiteSpec) -> SuiteSpec:
        spec = replace(
            spec,
            name=self.name,
            trials=self.trials if spec.trials is None else spec.trials,
            dims=tuple(spec.dims) or self.dims,
            lengths=tuple(spec.lengths) or self.lengths,
            classes=tuple(ClassId.coerce(c) for c in spec.classes),
        )
        if spec.trials < 0:
            raise ValueError(f"Trial count must be non-negative, got {spec.trials}")
        if min(spec.dims) < 1 or min(spec.lengths) < 1:
            raise ValueError("Dimensions and lengths must be positive")
        if self.uses_oracle or spec.config.method == "bruteforce":
            if max(spec.dims) > ORACLE_MAX_DIM or max(spec.lengths) > ORACLE_MAX_LENGTH:
                raise UnsupportedComputationError(
                    f"Brute-force oracle runs need dims <= {ORACLE_MAX_DIM} and lengths <= {ORACLE_MAX_LENGTH}"
                )
        return spec


SUITES: Dict[str, Suite] = {}

# statement names accepted on the command line for the suites that check them
SUITE_ALIASES: Dict[str, str] = {
    "lemma-2.2": "sup-equality",
    "theorem-2.8": "dual-representation",
    "proposition-3.1": "bidual-embedding",
    "theorem-3.5": "adjoint-duality",
    "theorem-3.6": "reverse-duality",
    "lemma-3.9": "injectivity",
    "corollary-3.10": "second-adjoint",
}


def register(name: str, covers: Sequence[str] = (), **defaults):
    def decorator(fn):
        SUITES[name] = Suite(name, fn, tuple(covers), (fn.__doc__ or "").strip(), **defaults)
        return fn

    return decorator


def get_suite(name: str) -> Suite:
    """A registered suite by name or by alias"""
    try:
        return SUITES[SUITE_ALIASES.get(name, name)]
    except KeyError:
        raise UnknownSuiteError(
            f"Unknown suite {name!r}; available: {', '.join(sorted(SUITES))}; aliases: {', '.join(SUITE_ALIASES)}"
        ) from None


def aliases_of(name: str) -> List[str]:
    return [alias for alias, target in SUITE_ALIASES.items() if target == name]


def list_suites() -> List[Suite]:
    return [SUITES[name] for name in sorted(SUITES)]


def covered_operations() -> set:
    return {op for s in SUITES.values() for op in s.covers}


class TrialContext:
    """Per-trial random source, configuration and record of the drawn inputs."""

    def __init__(self, spec: SuiteSpec, index: int):
        self.spec = spec
        self.index = index
        self.rng = np.random.default_rng([spec.seed, index])
        # trials already run in parallel; keep inner work single-threaded
        self.cfg = replace(spec.config, seed=spec.seed, workers=1)
        self.inputs: Dict = {}

    @property
    def exact(self) -> float:
        return self.spec.tolerances.get("exact", DEFAULT_TOLERANCES["exact"])

    @property
    def ascent(self) -> float:
        return self.spec.tolerances.get("ascent", DEFAULT_TOLERANCES["ascent"])

    def tol(self, *certs) -> float:
        return self.exact if all(c.is_exact for c in certs) else self.ascent

    def dim(self) -> int:
        return int(choose(self.rng, self.spec.dims))

    def length(self) -> int:
        return int(choose(self.rng, self.spec.lengths))

    def seq_class(self, defaults: Sequence[ClassId], keep: Callable[[ClassId], bool] = lambda c: True,
                  cycle: bool = False) -> ClassId:
        """A class from SuiteSpec.classes or the defaults; `cycle` walks the pool by trial index."""
        pool = [c for c in (self.spec.classes or defaults) if keep(c)] or [c for c in defaults if keep(c)]
        chosen = pool[self.index % len(pool)] if cycle else choose(self.rng, pool)
        self.inputs["class"] = str(chosen)
        return chosen

    def record(self, **values):
        for key, value in values.items():
            if isinstance(value, Space):
                value = value.describe()
            elif isinstance(value, VecSeq):
                value = describe_sequence(value)
            elif isinstance(value, LinOp):
                value = value.describe()
            elif isinstance(value, ClassId):
                value = str(value)
            self.inputs[key] = value


def _base_class(seq_class: ClassId) -> ClassId:
    while seq_class.kind is ClassKind.DUAL:
        seq_class = seq_class.inner
    return seq_class


def _index_of(seq_class: ClassId):
    return _base_class(seq_class).p


def space_for(ctx: TrialContext, seq_class: ClassId, dim: int) -> Space:
    """
    A random space on which the class norm has an exact or reliable path:
    vertex spaces, Hilbert spaces as well at index 2.

    Cohen and mid norms are only closed-form on Hilbert spaces at index 2 (cohen:1 is
    lp:1 everywhere); at the other indices they are drawn on the line, where every
    indexed class collapses to lp.
    """
    base = _base_class(seq_class)
    p = base.p
    if base.kind in (ClassKind.COHEN, ClassKind.MID) and dim > 1:
        if p == 2:
            return Space.pnorm(dim, 2)
        if not (base.kind is ClassKind.COHEN and p == 1):
            return random_space(ctx.rng, 1, VERTEX_FAMILIES + SMOOTH_FAMILIES)
    families = VERTEX_FAMILIES + SMOOTH_FAMILIES if p in (None, 2) else VERTEX_FAMILIES
    return random_space(ctx.rng, dim, families)


# --- spaces and optimisation --------------------------------------------------


@register("spaces", covers=("norm", "dual_space", "extreme_points", "conjugate_index"), trials=50)
def _spaces(ctx: TrialContext) -> List[Check]:
    """Norm axioms, Hoelder's inequality, bipolar identities and conjugate indices."""
    dim = ctx.dim()
    space = random_space(ctx.rng, dim, VERTEX_FAMILIES + SMOOTH_FAMILIES)
    v, w, g = ctx.rng.standard_normal((3, dim))
    t = float(ctx.rng.standard_normal())
    p = to_index(random_index(ctx.rng))
    ctx.record(space=space, v=v, w=w, g=g, t=t, p=format_index(p))
    dual = dual_space(space)
    tol = ctx.exact
    checks = [
        Check("triangle inequality", norm(space, v + w), norm(space, v) + norm(space, w), tol=tol),
        Check("homogeneity", norm(space, t * v), abs(t) * norm(space, v), EQUAL, tol=tol),
        Check("norming functional", float(space.subgradient(v) @ v), norm(space, v), EQUAL, tol=tol),
        Check("holder", abs(float(g @ v)), norm(dual, g) * norm(space, v), tol=tol),
        Check("bidual is the space", float(dual_space(dual) == space), 1.0, EQUAL, tol=tol),
        Check("conjugate involution", float(conjugate_index(conjugate_index(p))), float(p), EQUAL, tol=tol),
        Check("conjugate sum", 1 / float(p) + 1 / float(conjugate_index(p)), 1.0, EQUAL, tol=tol),
    ]
    points = extreme_points(space)
    if points is not None:
        radii = space.norms(points)
        checks.append(Check("extreme points on the sphere", float(np.abs(radii - 1).max()), 0.0, EQUAL, tol=tol))
    dual_points = extreme_points(dual)
    if dual_points is not None:
        checks.append(Check("bipolar", float(np.abs(dual_points @ v).max()), norm(space, v), EQUAL, tol=tol))
    return checks


@register(
    "oracle",
    covers=(
        "maximize_over_ball", "brute_force_sup", "maximize_over_seq_ball", "class_norm", "dual_norm", "summing_norm",
    ),
    trials=10,
    lengths=(1, 2),
    uses_oracle=True,
)
def _oracle(ctx: TrialContext) -> List[Check]:
    """
    Ascent and vertex enumeration against the brute-force grid and its discretisation band,
    on linear objectives, operator images, sequence balls over the line, and the weak, dual
    and summing norms of a curved space.
    """
    cfg = replace(ctx.cfg, restarts=max(ctx.cfg.restarts, ORACLE_RESTARTS))
    resolution = cfg.grid_resolution
    dim = ctx.dim()
    space = random_space(ctx.rng, dim, VERTEX_FAMILIES + SMOOTH_FAMILIES)
    g = ctx.rng.standard_normal(dim)
    ctx.record(space=space, g=g)

    # |<g, v>| peaks at the dual norm of g
    linear = ConvexObjective(
        func=lambda v: abs(float(v @ g)),
        subgradient=lambda v: np.sign(float(v @ g)) * g,
        batch=lambda vs: np.abs(vs @ g),
    )
    exact = norm(space.dual, g)
    ascent = maximize_over_ball(linear, space, replace(cfg, method="ascent"))
    brute = brute_force_sup(linear, space, resolution)
    band = discretization_band(space, resolution)
    checks = [
        Check("ascent = dual norm", ascent.value, exact, EQUAL, tol=ctx.ascent),
        Check("brute <= dual norm", brute, exact, tol=ctx.exact),
        Check("dual norm <= band upper", exact, oracle_upper(brute, band), tol=ctx.exact),
    ]

    if space.extreme_points() is not None:
        target = random_space(ctx.rng, dim, VERTEX_FAMILIES + SMOOTH_FAMILIES)
        M = ctx.rng.standard_normal((dim, dim))
        ctx.record(target=target, matrix=M)
        image = ConvexObjective(func=lambda v: target.norm(M @ v), batch=lambda vs: target.norms(vs @ M.T))
        vertex = maximize_over_ball(image, space, cfg)
        brute = brute_force_sup(image, space, resolution)
        checks += [
            Check("brute <= vertex enumeration", brute, vertex.value, tol=ctx.exact),
            Check("vertex enumeration <= band upper", vertex.value, oracle_upper(brute, band), tol=ctx.exact),
        ]

    # sequence balls over the line, k <= 2
    k = min(ctx.length(), 2)
    scalar = random_space(ctx.rng, 1, VERTEX_FAMILIES)
    inner = ClassId.lp(to_index(random_index(ctx.rng)))
    x = random_sequence(ctx.rng, scalar, k)
    ctx.record(scalar_space=scalar, inner=inner, x=x)
    closed = dual_norm(DualNormProblem(inner, scalar, x), cfg).value
    objective = pairing_objective(x.vectors)
    seq_ascent = maximize_over_seq_ball(objective, inner, scalar.dual, k, replace(cfg, method="ascent"))
    seq_brute = maximize_over_seq_ball(objective, inner, scalar.dual, k, replace(cfg, method="bruteforce"))
    checks += [
        Check("sequence ascent = dual norm", seq_ascent.value, closed, EQUAL, tol=ctx.ascent),
        Check("sequence brute <= dual norm", seq_brute.value, closed, tol=ctx.exact),
        Check(
            "dual norm <= sequence band upper",
            closed,
            oracle_upper(seq_brute.value, seq_brute.details["band"]),
            tol=ctx.exact,
        ),
    ]
    return checks + _curved_oracle_checks(ctx, cfg)


def _curved_oracle_checks(ctx: TrialContext, cfg: OptConfig) -> List[Check]:
    """Ascent-computed weak, dual and summing norms on a curved space against the grid bracket."""
    resolution = cfg.grid_resolution
    dim = max(2, ctx.dim())
    curved = random_space(ctx.rng, dim, CURVED_FAMILIES)
    p = to_index(random_index(ctx.rng))
    weak = ClassId.weak(p)
    k = min(ctx.length(), 2)
    x = random_sequence(ctx.rng, curved, k)
    ctx.record(curved_space=curved, weak=weak, curved_x=x)

    X = x.vectors
    weak_objective = ConvexObjective(
        func=lambda phi: float(lp_norms(X @ phi, p)),
        batch=lambda phis: lp_norms(phis @ X.T, p),
    )
    ascent = class_norm(weak, x, cfg)
    brute = brute_force_sup(weak_objective, curved.dual, resolution)
    band = discretization_band(curved.dual, resolution)
    checks = [
        Check(f"brute <= {weak} ascent", brute, ascent.value, tol=ctx.ascent),
        Check(f"{weak} ascent <= band upper", ascent.value, oracle_upper(brute, band), tol=ctx.exact),
    ]

    # dual(weak) by forced ascent, against the sequence grid of the planar dual ball
    plane = curved if dim == 2 else random_space(ctx.rng, 2, CURVED_FAMILIES)
    y = random_sequence(ctx.rng, plane, 1)
    ctx.record(plane=plane, y=y)
    forced = dual_norm(DualNormProblem(weak, plane, y), replace(cfg, method="ascent"))
    grid = maximize_over_seq_ball(pairing_objective(y.vectors), weak, plane.dual, 1,
                                 replace(cfg, method="bruteforce", grid_resolution=NESTED_BRACKET_RESOLUTION))
    checks += [
        Check(f"brute <= dual({weak}) ascent", grid.value, forced.value, tol=ctx.ascent),
        Check(f"dual({weak}) ascent <= band upper", forced.value,
              oracle_upper(grid.value, grid.details["band"]), tol=ctx.exact),
    ]

    # summing norm from a line into the curved space at length 2
    line = random_space(ctx.rng, 1, VERTEX_FAMILIES + SMOOTH_FAMILIES)
    X_class = ClassId.lp(to_index(random_index(ctx.rng)))
    T = random_operator(ctx.rng, line, curved)
    ctx.record(line=line, summing_X=X_class, operator=T)
    summing = summing_norm(X_class, weak, T, 2, cfg)
    inner_cfg = cfg.nested()
    image_norm = ConvexObjective(func=lambda z: sequence_norm(weak, curved, z @ T.matrix.T, inner_cfg).value)
    grid = maximize_over_seq_ball(image_norm, X_class, line, 2,
                                  replace(cfg, method="bruteforce", grid_resolution=NESTED_BRACKET_RESOLUTION))
    checks += [
        Check("brute <= summing ascent", grid.value, summing.value, tol=ctx.ascent),
        Check("summing ascent <= band upper", summing.value,
              oracle_upper(grid.value, grid.details["band"]), tol=ctx.exact),
    ]
    return checks


# --- sequence classes -----------------------------------------------------------


@register("axioms", covers=("class_norm", "coordinate_axiom_check"), trials=50, lengths=(1, 2, 3, 4))
def _axioms(ctx: TrialContext) -> List[Check]:
    """Every class norm dominates the coordinate norms and equals ||v|| on v . e_j."""
    seq_class = ctx.seq_class(default_classes(), keep=lambda c: c.kind is not ClassKind.DUAL)
    dim, k = ctx.dim(), ctx.length()
    space = space_for(ctx, seq_class, dim)
    x = random_sequence(ctx.rng, space, k)
    j = int(ctx.rng.integers(1, k + 1))
    v = ctx.rng.standard_normal(space.dim)
    ctx.record(space=space, x=x, j=j, v=v)
    cert = class_norm(seq_class, x, ctx.cfg)
    lhs, rhs = coordinate_axiom_check(seq_class, space, v, j, ctx.cfg, length=k)
    return [
        Check("sup coordinate norm <= class norm", float(x.norms().max()), cert.value, tol=ctx.tol(cert)),
        Check("coordinate axiom", lhs, rhs, EQUAL, tol=ctx.tol(cert)),
    ]


@register("sign-invariance", covers=("class_norm",), trials=30)
def _sign_invariance(ctx: TrialContext) -> List[Check]:
    """Spherically complete classes ignore the signs of the terms."""
    seq_class = ctx.seq_class(default_classes(), keep=lambda c: c.flags.spherically_complete)
    dim, k = ctx.dim(), ctx.length()
    space = space_for(ctx, seq_class, dim)
    x = random_sequence(ctx.rng, space, k)
    signs = ctx.rng.choice([-1.0, 1.0], size=k)
    ctx.record(space=space, x=x, signs=signs)
    plain = class_norm(seq_class, x, ctx.cfg)
    flipped = class_norm(seq_class, x.with_signs(signs), ctx.cfg)
    return [Check("sign invariance", flipped.value, plain.value, EQUAL, tol=ctx.tol(plain, flipped))]


@register("prefix-monotonicity", covers=("prefix_norms",), trials=30, lengths=(2, 3, 4))
def _prefix_monotonicity(ctx: TrialContext) -> List[Check]:
    """Prefix norms never decrease and end at the full norm."""
    seq_class = ctx.seq_class(default_classes(), keep=lambda c: c.kind is not ClassKind.DUAL)
    dim, k = ctx.dim(), ctx.length()
    space = space_for(ctx, seq_class, dim)
    x = random_sequence(ctx.rng, space, k, sparsity=0.25)
    ctx.record(space=space, x=x)
    norms = prefix_norms(seq_class, x, ctx.cfg)
    full = class_norm(seq_class, x, ctx.cfg)
    checks = [
        Check(f"prefix {m} <= prefix {m + 1}", norms[m - 1], norms[m], tol=ctx.ascent)
        for m in range(1, len(norms))
    ]
    checks.append(Check("last prefix = norm", norms[-1], full.value, EQUAL, tol=ctx.exact))
    return checks


# --- dual classes -------------------------------------------------------------------


@register("sup-equality", covers=("sup_equality_check",), trials=50)
def _sup_equality(ctx: TrialContext) -> List[Check]:
    """
    For sign-invariant classes sup |sum <phi_j, x_j>| equals sup sum |<phi_j, x_j>|.
    Trials walk the classes in turn; a run with a single class gives every trial to it.
    """
    inner = ctx.seq_class(default_classes(), keep=lambda c: c.flags.spherically_complete, cycle=True)
    dim, k = ctx.dim(), ctx.length()
    space = space_for(ctx, inner, dim)
    x = random_sequence(ctx.rng, space, k)
    ctx.record(space=space, x=x)
    plain, absolute = sup_equality_check(DualNormProblem(inner, space, x), ctx.cfg)
    return [Check("plain sup = absolute sup", plain, absolute, EQUAL, tol=ctx.ascent)]


@register("dual-identities", covers=("dual_norm",), trials=50)
def _dual_identities(ctx: TrialContext) -> List[Check]:
    """
    Closed-form dual classes against a forced ascent over the inner unit ball; duals
    without a closed form against the brute-force bracket instead.
    """
    if ctx.spec.classes:
        inner = ctx.seq_class(ctx.spec.classes, keep=lambda c: c.flags.spherically_complete)
    else:
        inner = choose(ctx.rng, [
            ClassId.lp(to_index(random_index(ctx.rng))),
            ClassId.lp(1),
            ClassId.linf(),
            ClassId.weak(to_index(random_index(ctx.rng))),
        ])
        ctx.record(inner=inner)
    dim, k = ctx.dim(), ctx.length()
    space = space_for(ctx, inner, dim)
    closed_form = ball_equivalent(ClassId.dual(inner), space).kind is not ClassKind.DUAL
    if not closed_form:
        # compared against the grid, which needs k * dim <= ORACLE_MAX_DIM
        k = min(k, max(1, ORACLE_MAX_DIM // space.dim))
    x = random_sequence(ctx.rng, space, k)
    ctx.record(space=space, x=x)
    problem = DualNormProblem(inner, space, x)
    forced = dual_norm(problem, replace(ctx.cfg, method="ascent"))
    if closed_form:
        closed = dual_norm(problem, ctx.cfg)
        ctx.record(closed_form=closed.details.get("closed_form"))
        return [Check(f"dual({inner}) closed form = ascent", forced.value, closed.value, EQUAL, tol=ctx.ascent)]

    resolution = ctx.cfg.grid_resolution if k * space.dim < ORACLE_MAX_DIM else NESTED_BRACKET_RESOLUTION
    brute = maximize_over_seq_ball(
        pairing_objective(x.vectors), inner, space.dual, k,
        replace(ctx.cfg, method="bruteforce", grid_resolution=resolution),
    )
    ctx.record(band=brute.details["band"])
    return [
        Check(f"dual({inner}) brute <= ascent", brute.value, forced.value, tol=ctx.ascent),
        Check(f"dual({inner}) ascent <= band upper", forced.value,
              oracle_upper(brute.value, brute.details["band"]), tol=ctx.exact),
    ]


@register("holder-bound", covers=("pairing_apply",), trials=30)
def _holder_bound(ctx: TrialContext) -> List[Check]:
    """|J(phi)(x)| <= ||phi|| in X(E') times ||x|| in the dual class."""
    inner = ctx.seq_class(
        [ClassId.lp(2), ClassId.lp(4), ClassId.lp("4/3"), ClassId.lp(1), ClassId.linf()],
        keep=lambda c: c.kind in (ClassKind.LP, ClassKind.LINF, ClassKind.C0),
    )
    dim, k = ctx.dim(), ctx.length()
    space = random_space(ctx.rng, dim, VERTEX_FAMILIES + SMOOTH_FAMILIES)
    x = random_sequence(ctx.rng, space, k)
    phis = random_sequence(ctx.rng, space.dual, k)
    ctx.record(space=space, x=x, phis=phis)
    pairing = abs(pairing_apply(phis, x))
    phi_norm = class_norm(inner, phis, ctx.cfg)
    x_norm = dual_norm(DualNormProblem(inner, space, x), ctx.cfg)
    return [Check("holder bound", pairing, phi_norm.value * x_norm.value, tol=ctx.tol(phi_norm, x_norm))]


@register(
    "dual-representation",
    covers=("functional_norm_as_dual_element", "coordinate_functionals"),
    trials=30,
)
def _dual_representation(ctx: TrialContext) -> List[Check]:
    """The functional J(phi) on X(E) has the norm of phi in the dual class; I inverts J."""
    inner = ctx.seq_class(
        [ClassId.lp(to_index(random_index(ctx.rng))), ClassId.unconditional(to_index(random_index(ctx.rng))),
         ClassId.lp(1)],
        keep=lambda c: c.flags.dual_representable,
    )
    dim, k = ctx.dim(), ctx.length()
    space = space_for(ctx, inner, dim)
    phis = random_sequence(ctx.rng, space.dual, k)
    psi = ctx.rng.standard_normal((k, space.dim))
    y = random_sequence(ctx.rng, space, k)
    ctx.record(space=space, phis=phis, psi=psi, y=y)
    op_norm, as_dual = functional_norm_as_dual_element(inner, space, k, phis, ctx.cfg)

    def functional(s: VecSeq) -> float:
        return float(np.sum(psi * s.vectors))

    recovered = coordinate_functionals(functional, space, k, seed=ctx.spec.seed)
    return [
        Check("functional norm = dual class norm", op_norm, as_dual, EQUAL, tol=ctx.ascent),
        Check("recovered coordinates", float(np.abs(recovered.vectors - psi).max()), 0.0, EQUAL, tol=ctx.exact),
        Check("J(I(f)) = f", pairing_apply(recovered, y), functional(y), EQUAL, tol=ctx.exact),
    ]


@register("bidual-embedding", covers=("bidual_gap",), trials=30)
def _bidual_embedding(ctx: TrialContext) -> List[Check]:
    """x embeds into the bidual class without gaining norm; isometrically for these classes."""
    inner = ctx.seq_class(
        [ClassId.lp(to_index(random_index(ctx.rng))), ClassId.lp(1), ClassId.linf(), ClassId.c0()],
        keep=lambda c: c.flags.spherically_complete and c.flags.linearly_stable,
    )
    dim, k = ctx.dim(), ctx.length()
    space = random_space(ctx.rng, dim, VERTEX_FAMILIES + SMOOTH_FAMILIES)
    x = random_sequence(ctx.rng, space, k)
    ctx.record(space=space, x=x)
    plain, bidual = bidual_gap(inner, x, ctx.cfg)
    return [
        Check("bidual norm <= norm", bidual, plain, tol=ctx.exact),
        Check("bidual norm = norm", bidual, plain, EQUAL, tol=ctx.exact),
    ]


@register("mid-sandwich", covers=("class_norm", "dual_norm"), trials=20)
def _mid_sandwich(ctx: TrialContext) -> List[Check]:
    """||x|| in lp(E) <= ||x|| in dual(mid:p*) <= ||x|| in cohen:p."""
    dim, k = ctx.dim(), ctx.length()
    if dim == 1:
        p = to_index(random_index(ctx.rng))
        space = random_space(ctx.rng, 1, VERTEX_FAMILIES + SMOOTH_FAMILIES)
    else:
        p = to_index(random_index(ctx.rng, ("1", "2")))
        space = Space.pnorm(dim, 2) if p == 2 else random_space(ctx.rng, dim, VERTEX_FAMILIES)
    x = random_sequence(ctx.rng, space, k)
    ctx.record(p=format_index(p), space=space, x=x)
    strong, middle, cohen = mid_sandwich(p, x, ctx.cfg)
    return [
        Check("lp <= dual(mid)", strong, middle, tol=ctx.exact),
        Check("dual(mid) <= cohen", middle, cohen, tol=ctx.exact),
    ]


# --- operators ------------------------------------------------------------------------


def _operator_pair(ctx: TrialContext, families=("lp", "lpu", "lpw")) -> Tuple[ClassId, ClassId]:
    """X from the requested families (or spec classes) and Y = lp:q with q >= the index of X."""
    if ctx.spec.classes:
        X = choose(ctx.rng, ctx.spec.classes)
    else:
        builders = {"lp": ClassId.lp, "lpu": ClassId.unconditional, "lpw": ClassId.weak}
        X = builders[choose(ctx.rng, families)](to_index(random_index(ctx.rng)))
    p = _index_of(X) or 1
    q = to_index(random_index(ctx.rng, [i for i in INDICES if to_index(i) >= p] or ["4"]))
    Y = ClassId.lp(q)
    ctx.record(X=X, Y=Y)
    return X, Y


def _operator_spaces(ctx: TrialContext, X: ClassId) -> Tuple[Space, Space]:
    """Vertex spaces, Hilbert spaces at index 2, and a curved pair in one planar trial out of five."""
    d1, d2 = ctx.dim(), ctx.dim()
    draw = ctx.rng.random()
    if _index_of(X) == 2 and draw < 0.25:
        return Space.pnorm(d1, 2), Space.pnorm(d2, 2)
    if d1 == d2 == 2 and draw >= 0.8:
        return random_space(ctx.rng, 2, CURVED_FAMILIES), random_space(ctx.rng, 2, CURVED_FAMILIES)
    return random_space(ctx.rng, d1), random_space(ctx.rng, d2)


def _report_checks(ctx: TrialContext, report, tol: float, asserted_only: bool = True) -> List[Check]:
    ctx.record(values=report.values, hypotheses=report.hypotheses)
    return [
        Check(c.name, c.lhs, c.rhs, LESS_EQUAL, tol=tol)
        for c in report.checks
        if c.asserted or not asserted_only
    ]


@register(
    "adjoint-duality",
    covers=("adjoint", "apply_elementwise", "summing_norm", "adjoint_duality_report"),
    trials=20,
    dims=(1, 2),
    lengths=(1, 2),
)
def _adjoint_duality(ctx: TrialContext) -> List[Check]:
    """||T'|| in (dual Y; dual X) against ||T|| in (X; Y) under the stated hypotheses."""
    X, Y = _operator_pair(ctx)
    E, F = _operator_spaces(ctx, X)
    T = random_operator(ctx.rng, E, F)
    k = ctx.length()
    ctx.record(domain=E, codomain=F, operator=T, k=k)
    cfg = ctx.cfg
    report = adjoint_duality_report(X, Y, T, k, cfg, tol=ctx.ascent)
    a = report.certificates["a"]
    replay = class_norm(Y, apply_elementwise(T, a.witness), cfg).value
    checks = _report_checks(ctx, report, ctx.ascent)
    checks += [
        Check("witness replay", replay, a.value, EQUAL, tol=ctx.exact),
        Check("adjoint transposes", float(np.abs(adjoint(T).matrix - T.matrix.T).max()), 0.0, EQUAL, tol=ctx.exact),
    ]
    return checks


@register("reverse-duality", covers=("reverse_duality_report",), trials=20, dims=(1, 2), lengths=(1, 2))
def _reverse_duality(ctx: TrialContext) -> List[Check]:
    """||T|| in (dual Y; dual X) against ||T'|| in (X; Y)."""
    X, Y = _operator_pair(ctx)
    E, F = _operator_spaces(ctx, X)
    T = random_operator(ctx.rng, E, F)
    k = ctx.length()
    ctx.record(domain=E, codomain=F, operator=T, k=k)
    report = reverse_duality_report(X, Y, T, k, ctx.cfg, tol=ctx.ascent)
    return _report_checks(ctx, report, ctx.ascent)


@register("second-adjoint", covers=("second_adjoint_check",), trials=20, dims=(1, 2), lengths=(1, 2))
def _second_adjoint(ctx: TrialContext) -> List[Check]:
    """T and T'' have the same summing norm; exercises double dualisation of polytope spaces."""
    X, Y = _operator_pair(ctx)
    E, F = _operator_spaces(ctx, X)
    T = random_operator(ctx.rng, E, F)
    k = ctx.length()
    ctx.record(domain=E, codomain=F, operator=T, k=k)
    report = second_adjoint_check(X, Y, T, k, ctx.cfg, tol=ctx.exact)
    return _report_checks(ctx, report, ctx.exact, asserted_only=False)


@register("injectivity", covers=("summing_norm",), trials=20, dims=(1, 2), lengths=(1, 2))
def _injectivity(ctx: TrialContext) -> List[Check]:
    """Embedding the codomain isometrically into a sup-norm space keeps the summing norm."""
    X, Y = _operator_pair(ctx, families=("lp",))
    d1, d2 = ctx.dim(), ctx.dim()
    E, F = random_space(ctx.rng, d1), random_space(ctx.rng, d2)
    T = random_operator(ctx.rng, E, F)
    k = ctx.length()
    ctx.record(domain=E, codomain=F, operator=T, k=k)
    report = injectivity_probe(X, Y, T, k, ctx.cfg, tol=ctx.ascent)
    return _report_checks(ctx, report, ctx.ascent)


@register("ideal-property", covers=("summing_norm",), trials=20, dims=(1, 2), lengths=(1, 2))
def _ideal_property(ctx: TrialContext) -> List[Check]:
    """||A T B|| in (X; Y) <= ||A|| ||T|| ||B||."""
    X, Y = _operator_pair(ctx, families=("lp",))
    spaces = [random_space(ctx.rng, ctx.dim()) for _ in range(4)]
    B = random_operator(ctx.rng, spaces[0], spaces[1])
    T = random_operator(ctx.rng, spaces[1], spaces[2])
    A = random_operator(ctx.rng, spaces[2], spaces[3])
    k = ctx.length()
    ctx.record(A=A, T=T, B=B, k=k)
    report = ideal_property_check(X, Y, A, T, B, k, ctx.cfg, tol=ctx.ascent)
    return _report_checks(ctx, report, ctx.ascent)


@register("known-values", covers=("summing_norm", "class_norm", "dual_norm"), trials=3, dims=(1, 2, 3))
def _known_values(ctx: TrialContext) -> List[Check]:
    """Hand-computed values plus the cohen:1 = lp:1 collapse on a random instance."""
    cfg = ctx.cfg
    l2 = Space.pnorm(2, 2)
    line = Space.pnorm(1, 2)
    scalars = VecSeq.scalars([1.0, 2.0, 3.0])
    pi = summing_norm(ClassId.weak(2), ClassId.lp(2), LinOp.identity(l2), 2, cfg)
    checks = [
        Check("weak-2 to lp-2 identity, k=2", pi.value, float(np.sqrt(2.0)), EQUAL, tol=ctx.ascent),
        Check("lp:2 of (3,4),(0,0)", class_norm(ClassId.lp(2), VecSeq(l2, [[3, 4], [0, 0]]), cfg).value, 5.0,
              EQUAL, tol=ctx.exact),
        Check("dual(linf) of 1,2,3", dual_norm(DualNormProblem(ClassId.linf(), line, scalars), cfg).value, 6.0,
              EQUAL, tol=ctx.exact),
        Check("dual(lp:1) of 1,2,3", dual_norm(DualNormProblem(ClassId.lp(1), line, scalars), cfg).value, 3.0,
              EQUAL, tol=ctx.exact),
        Check("rad of e1, e2", class_norm(ClassId.rad(), VecSeq(l2, np.eye(2)), cfg).value, float(np.sqrt(2.0)),
              EQUAL, tol=ctx.exact),
        Check("lpw:2 of scalars 3,4", class_norm(ClassId.weak(2), VecSeq.scalars([3, 4]), cfg).value, 5.0,
              EQUAL, tol=ctx.exact),
    ]
    dim = ctx.dim()
    space = random_space(ctx.rng, dim, VERTEX_FAMILIES + SMOOTH_FAMILIES)
    x = random_sequence(ctx.rng, space, ctx.length())
    ctx.record(space=space, x=x)
    checks.append(Check(
        "cohen:1 = lp:1",
        class_norm(ClassId.cohen(1), x, cfg).value,
        class_norm(ClassId.lp(1), x, cfg).value,
        EQUAL,
        tol=ctx.exact,
    ))
    return checks


def _run_trial(suite: Suite, spec: SuiteSpec, index: int) -> TrialResult:
    ctx = TrialContext(spec, index)
    try:
        checks = suite.run(ctx)
    except Exception as e:
        logging.error(f"Suite {suite.name} trial {index} raised {type(e).__name__}: {e}")
        return TrialResult(index, ctx.inputs, error=f"{type(e).__name__}: {e}")
    return TrialResult(index, ctx.inputs, checks)


def run_suite(spec: SuiteSpec) -> SuiteReport:
    """Run every trial of a suite; trials may run in parallel, results are ordered by index."""
    suite = get_suite(spec.name)
    spec = suite.resolve(spec)
    logging.info(f"Running suite {suite.name}: {spec.trials} trials, seed {spec.seed}")
    trials = map_ordered(lambda i: _run_trial(suite, spec, i), list(range(spec.trials)), spec.config.workers)
    report = SuiteReport(suite.name, spec.seed, trials, config=spec.as_dict(), covers=list(suite.covers))
    logging.info(
        f"Suite {suite.name}: {len(trials) - len(report.failures)}/{len(trials)} trials passed, "
        f"max violation {report.max_violation:.3g}"
    )
    return report
