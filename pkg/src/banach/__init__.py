"""
Finite-dimensional engine for vector-valued sequence classes, their dual classes
and (X;Y)-summing operator norms.
"""
from .dualize import (
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
from .exceptions import (
    DimensionMismatchError,
    HypothesisError,
    IndexRangeError,
    InvalidSpaceError,
    MalformedObjectiveError,
    ManifestError,
    NonLinearFunctionalError,
    SummingError,
    UnknownSuiteError,
    UnsupportedComputationError,
)
from .opideal import (
    DualityReport,
    InequalityCheck,
    LinOp,
    adjoint,
    adjoint_duality_report,
    apply_elementwise,
    ideal_property_check,
    injectivity_probe,
    isometric_embedding_into_linf,
    operator_norm,
    reverse_duality_report,
    second_adjoint_check,
    summing_norm,
)
from .optimize import (
    ConvexObjective,
    NormCert,
    OptConfig,
    brute_force_sup,
    discretization_band,
    maximize_over_ball,
    maximize_over_seq_ball,
    oracle_upper,
)
from .seqnorm import ClassFlags, ClassId, ClassKind, VecSeq, class_norm, coordinate_axiom_check, prefix_norms
from .space import INF, Polytope, PNorm, Space, WeightedPNorm, conjugate_index, dual_space, extreme_points, norm

__all__ = [
    "INF",
    "ClassFlags",
    "ClassId",
    "ClassKind",
    "ConvexObjective",
    "DimensionMismatchError",
    "DualNormProblem",
    "DualityReport",
    "HypothesisError",
    "IndexRangeError",
    "InequalityCheck",
    "InvalidSpaceError",
    "LinOp",
    "MalformedObjectiveError",
    "ManifestError",
    "NonLinearFunctionalError",
    "NormCert",
    "OptConfig",
    "PNorm",
    "Polytope",
    "Space",
    "SummingError",
    "UnknownSuiteError",
    "UnsupportedComputationError",
    "VecSeq",
    "WeightedPNorm",
    "adjoint",
    "adjoint_duality_report",
    "apply_elementwise",
    "bidual_gap",
    "brute_force_sup",
    "class_norm",
    "conjugate_index",
    "coordinate_axiom_check",
    "coordinate_functionals",
    "discretization_band",
    "dual_norm",
    "dual_space",
    "extreme_points",
    "functional_norm_as_dual_element",
    "ideal_property_check",
    "injectivity_probe",
    "isometric_embedding_into_linf",
    "maximize_over_ball",
    "maximize_over_seq_ball",
    "mid_sandwich",
    "norm",
    "operator_norm",
    "oracle_upper",
    "pairing_apply",
    "prefix_norms",
    "reverse_duality_report",
    "second_adjoint_check",
    "sequence_norm",
    "summing_norm",
    "sup_equality_check",
]
