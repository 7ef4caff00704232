"""Instance families, brute-force mechanism search and delegation-gap sweeps."""

from pandora_delegation.harness.brute_force import (
    BruteForceResult,
    Option,
    brute_force_optimal_mechanism,
    homogeneous_k_values,
    score_candidate,
)
from pandora_delegation.harness.families import (
    FamilyId,
    FamilySpec,
    generate_family,
    parse_family,
    share_dependent,
)
from pandora_delegation.harness.gap import (
    GapReport,
    GapRow,
    best_ocrs_member,
    constructor_delegation,
    fit_log_slope,
    gap_sweep,
    ratio_interval,
)

__all__ = [
    "BruteForceResult",
    "FamilyId",
    "FamilySpec",
    "GapReport",
    "GapRow",
    "Option",
    "best_ocrs_member",
    "brute_force_optimal_mechanism",
    "constructor_delegation",
    "fit_log_slope",
    "gap_sweep",
    "generate_family",
    "homogeneous_k_values",
    "parse_family",
    "ratio_interval",
    "score_candidate",
]
