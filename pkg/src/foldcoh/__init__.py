"""Exact cohomology rings of 7-manifolds built from fold maps."""
from .analysis import (
    ComparisonReport,
    IsotropyReport,
    ObstructionVerdict,
    compare_models,
    isotropic_rank_search,
    pairing_determinants,
    special_generic_obstruction,
    square_of,
    vanishing_locus,
)
from .construction import (
    CharacteristicRecord,
    ConstructionParams,
    ManifoldModel,
    Provenance,
    build,
    build_theorem1,
    build_theorem5,
    build_theorem6,
    homology_table,
    verify_model,
)
from .errors import DimensionError, FoldcohError, ParameterError, ShapeError, SurgeryError
from .linalg import IntegerMatrix, SmithDecomposition, determinant, is_unimodular, smith_normal_form
from .ring import CohomologyClass, GradedRing, Label, check_ring, cup, pairing_matrix
from .surgery import (
    Crossing,
    InvariantRecord,
    NormalSystem,
    RoundFoldDescriptor,
    SphereEntry,
    apply_atss,
    apply_point_atss,
    apply_pontryagin,
    base_special_generic,
    pipeline_equivalence,
    round_fold_descriptor,
    validate_normal_system,
    validate_round_fold,
)

__version__ = "0.1.0"
