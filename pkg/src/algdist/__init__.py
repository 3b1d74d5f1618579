"""Algebraic and derivated algebraic distances of cycles in complex
projective space, with exact small-case oracles and a seeded randomized
verification harness."""

from ._rng import as_generator, block_rng, trial_rng
from .combinatorics import (
    TIE_TOL,
    CutSet,
    DistanceProfile,
    MergePath,
    build_cutset,
    build_path,
    build_profile,
    comb_bounds,
    cut_set,
    h_function,
    joint_distance,
    joint_matrix,
    k0_of,
    merge_path,
    reordering_residual,
    verify_comb,
)
from .cycles import (
    LinearCycle,
    ProductDivisor,
    ZeroCycle,
    intersect_divisor_line,
    intersect_product_divisors,
    line_covector,
    line_through,
    poly_degree,
    poly_eval,
    poly_mul,
    random_dense_poly,
    section_log_norm,
)
from .distance import (
    DerivatedDistance,
    DistanceValue,
    algebraic_distance,
    chart_derivative_sup,
    chart_polynomial_jet,
    derivated_distance,
    derivative_sup_reciprocal,
    divisor_pair_distance,
    harmonic,
    hypeb_compare,
    line_divisor_distance,
    line_family_derivated,
    log_norm_integral,
    main2_check,
    point_cycle_exp_jet,
    product_divisor_integral,
    restrict_zero_cycle_to_line,
)
from .grassmann import (
    BruhatChart,
    GrassPoint,
    complement_frame,
    contained_subspace,
    find_far_subspace,
    grass_big_residual,
    grass_distance,
    haar_subspace,
    incidence_distance,
    nearest_incident_subspace,
    trfunk_direct_sum,
    tube_measure,
)
from .harness import (
    EXPERIMENT_NAMES,
    ExperimentConfig,
    default_config,
    fit_implied_constant,
    load_config,
    run_experiment,
)
from .jets import (
    Jet,
    JetBudgetError,
    JetDomainError,
    JetSingularityError,
    extract_partial,
    get_table,
    jet_compose,
    jet_seed,
    per_order_sup_log,
    sup_log_partial,
)
from .projective import (
    AffineChart,
    chart_distortion_bounds,
    diagonal_point,
    fs_distance,
    householder_unitary,
    join_line_frame,
    normalize,
    orthonormal_frame,
    point_subspace_distance,
    random_point,
    random_points,
)

__version__ = "0.1.0"

__all__ = [
    "AffineChart",
    "BruhatChart",
    "CutSet",
    "DerivatedDistance",
    "DistanceProfile",
    "DistanceValue",
    "EXPERIMENT_NAMES",
    "ExperimentConfig",
    "GrassPoint",
    "Jet",
    "JetBudgetError",
    "JetDomainError",
    "JetSingularityError",
    "LinearCycle",
    "MergePath",
    "ProductDivisor",
    "TIE_TOL",
    "ZeroCycle",
    "algebraic_distance",
    "as_generator",
    "block_rng",
    "build_cutset",
    "build_path",
    "build_profile",
    "chart_derivative_sup",
    "chart_distortion_bounds",
    "chart_polynomial_jet",
    "comb_bounds",
    "complement_frame",
    "contained_subspace",
    "cut_set",
    "default_config",
    "derivated_distance",
    "derivative_sup_reciprocal",
    "diagonal_point",
    "divisor_pair_distance",
    "extract_partial",
    "find_far_subspace",
    "fit_implied_constant",
    "fs_distance",
    "get_table",
    "grass_big_residual",
    "grass_distance",
    "h_function",
    "haar_subspace",
    "harmonic",
    "householder_unitary",
    "hypeb_compare",
    "incidence_distance",
    "intersect_divisor_line",
    "intersect_product_divisors",
    "jet_compose",
    "jet_seed",
    "join_line_frame",
    "joint_distance",
    "joint_matrix",
    "k0_of",
    "line_covector",
    "line_divisor_distance",
    "line_family_derivated",
    "line_through",
    "load_config",
    "log_norm_integral",
    "main2_check",
    "merge_path",
    "nearest_incident_subspace",
    "normalize",
    "orthonormal_frame",
    "per_order_sup_log",
    "point_cycle_exp_jet",
    "point_subspace_distance",
    "poly_degree",
    "poly_eval",
    "poly_mul",
    "product_divisor_integral",
    "random_dense_poly",
    "random_point",
    "random_points",
    "reordering_residual",
    "restrict_zero_cycle_to_line",
    "run_experiment",
    "section_log_norm",
    "sup_log_partial",
    "trfunk_direct_sum",
    "tube_measure",
    "verify_comb",
    "__version__",
]
