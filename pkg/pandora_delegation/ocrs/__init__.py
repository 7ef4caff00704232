"""Ex-ante vectors, quantile thresholds and greedy OCRS families."""

from pandora_delegation.ocrs.ex_ante import (
    ExAnteVector,
    concave_objective,
    ex_ante_concave,
    ex_ante_membership,
    in_polytope,
)
from pandora_delegation.ocrs.greedy import (
    KNAPSACK_ALPHA,
    MATROID_ALPHA,
    FamilyMember,
    GreedyFamily,
    build_greedy_ocrs,
)
from pandora_delegation.ocrs.quantiles import quantile_threshold, top_mass_value
from pandora_delegation.ocrs.selectability import SelectabilityReport, estimate_selectability

__all__ = [
    "ExAnteVector",
    "FamilyMember",
    "GreedyFamily",
    "KNAPSACK_ALPHA",
    "MATROID_ALPHA",
    "SelectabilityReport",
    "build_greedy_ocrs",
    "concave_objective",
    "estimate_selectability",
    "ex_ante_concave",
    "ex_ante_membership",
    "in_polytope",
    "quantile_threshold",
    "top_mass_value",
]
