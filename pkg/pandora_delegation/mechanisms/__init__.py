"""Single-proposal delegation mechanisms and their constructors."""

from pandora_delegation.mechanisms.builders import (
    SharedCostSplit,
    accept_all_mechanism,
    acceptance_mass,
    build_binary_matroid,
    build_free_agent_kuniform,
    build_free_agent_ocrs,
    build_shared_cost,
    outcome_pattern_mechanism,
    shared_cost_split,
)
from pandora_delegation.mechanisms.mechanism import (
    Outcome,
    Provenance,
    SingleProposalMechanism,
    accepts,
    realized_outcomes,
)

__all__ = [
    "Outcome",
    "Provenance",
    "SharedCostSplit",
    "SingleProposalMechanism",
    "accept_all_mechanism",
    "acceptance_mass",
    "accepts",
    "build_binary_matroid",
    "build_free_agent_kuniform",
    "build_free_agent_ocrs",
    "build_shared_cost",
    "outcome_pattern_mechanism",
    "realized_outcomes",
    "shared_cost_split",
]
