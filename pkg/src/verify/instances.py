"""Seeded random spaces, sequences and operators for the verification suites."""
from typing import Dict, Optional, Sequence

import numpy as np

from banach.opideal import LinOp
from banach.seqnorm import ClassId, VecSeq
from banach.space import INF, Space, format_index, to_index

# spaces whose unit balls and dual balls both have finite vertex lists
VERTEX_FAMILIES = ("l1", "linf", "weighted-l1", "weighted-linf", "polytope")
SMOOTH_FAMILIES = ("l2",)
# smooth balls without a spectral closed form; norms on them go through ascent
CURVED_FAMILIES = ("l4", "l4/3")

INDICES = ("1", "4/3", "2", "4")


def random_polytope(rng: np.random.Generator, dim: int) -> Space:
    points = rng.standard_normal((dim + 2, dim))
    # keep the cross-polytope inside so the body spans the space
    points = np.vstack([points, np.eye(dim) * 0.5])
    return Space.polytope(np.vstack([points, -points]))


def random_space(rng: np.random.Generator, dim: int, families: Sequence[str] = VERTEX_FAMILIES) -> Space:
    family = families[int(rng.integers(len(families)))]
    if family == "l1":
        return Space.pnorm(dim, 1)
    if family == "linf":
        return Space.pnorm(dim, INF)
    if family == "l2":
        return Space.pnorm(dim, 2)
    if family in CURVED_FAMILIES:
        return Space.pnorm(dim, family[1:])
    if family == "weighted-l1":
        return Space.weighted(1, rng.uniform(0.5, 2.0, dim))
    if family == "weighted-linf":
        return Space.weighted(INF, rng.uniform(0.5, 2.0, dim))
    if family == "polytope":
        return random_polytope(rng, dim)
    raise ValueError(f"Unknown space family {family!r}")


def random_sequence(rng: np.random.Generator, space: Space, length: int, sparsity: float = 0.0) -> VecSeq:
    X = rng.standard_normal((length, space.dim))
    if sparsity > 0:
        X[rng.random(length) < sparsity] = 0.0
    return VecSeq(space, X)


def random_operator(rng: np.random.Generator, domain: Space, codomain: Space) -> LinOp:
    return LinOp.gaussian(domain, codomain, rng)


def random_index(rng: np.random.Generator, choices: Sequence[str] = INDICES) -> str:
    return choices[int(rng.integers(len(choices)))]


def choose(rng: np.random.Generator, options: Sequence):
    return options[int(rng.integers(len(options)))]


def default_classes(indices: Sequence[str] = INDICES) -> Sequence[ClassId]:
    """Every indexed class family at each of `indices`, then the index-free families."""
    indexed = [
        build(to_index(p))
        for p in indices
        for build in (ClassId.lp, ClassId.weak, ClassId.unconditional, ClassId.cohen, ClassId.mid)
    ]
    return indexed + [ClassId.linf(), ClassId.c0(), ClassId.c0w(), ClassId.rad(), ClassId.rad_sup()]


def describe_sequence(x: VecSeq) -> Dict:
    return {"space": x.space.describe(), "vectors": x.to_list()}


def describe_index(p) -> Optional[str]:
    return None if p is None else format_index(p)
