"""Majorization, catalysis and impostor bounds for entanglement-based identification."""

__version__ = "0.1.0"

from .approximation import (
    ConstraintSpec,
    Method,
    OptimizationResult,
    brute_force_oracle,
    kkt_check,
    min_over_k_bound,
    repeated_pass_probability,
    repetitions_for_error,
    single_constraint_bound,
    solve_pure_approximation,
)
from .catalysis import CatalysisReport, search_catalyst, verify_catalyst
from .majorization import (
    EntanglementOrdering,
    MonotoneProfile,
    TTransformChain,
    compare,
    locc_convertible,
    majorizes,
    monotone_profile,
    t_transform_chain,
)
from .schmidt import (
    DEFAULT_TOL,
    BipartitePureState,
    RngStream,
    SchmidtVector,
    ToleranceConfig,
    bhattacharyya_sq,
    fidelity_pure,
    normalize_and_sort,
    sample_state_with_spectrum,
    schmidt_spectrum,
    tensor,
)
