"""Set systems: matroids, knapsack, bipartite matching and restrictions."""

from pandora_delegation.constraints.knapsack import knapsack_max_weight
from pandora_delegation.constraints.oracles import (
    BipartiteMatching,
    ConstraintKind,
    ConstraintOracle,
    Knapsack,
    KUniform,
    MatroidByOracle,
    PartitionMatroid,
    RestrictedOracle,
    capacity_one,
    enumerate_feasible,
    graphic_matroid,
    is_feasible,
    is_matroid_kind,
    max_weight_feasible,
    rank,
    restrict,
    unwrap,
)

__all__ = [
    "BipartiteMatching",
    "ConstraintKind",
    "ConstraintOracle",
    "KUniform",
    "Knapsack",
    "MatroidByOracle",
    "PartitionMatroid",
    "RestrictedOracle",
    "capacity_one",
    "enumerate_feasible",
    "graphic_matroid",
    "is_feasible",
    "is_matroid_kind",
    "knapsack_max_weight",
    "max_weight_feasible",
    "rank",
    "restrict",
    "unwrap",
]
