"""Core data model: distributions, instances, cap values, profiles, validation."""

from pandora_delegation.core.acceptance import (
    AcceptanceRule,
    OutcomeSetRule,
    Piece,
    ThresholdRule,
    acceptance_probability,
    clamp_nonpositive_threshold,
    refine_outcomes,
)
from pandora_delegation.core.distributions import Atom, FiniteJointDistribution, cap_value, expected_excess
from pandora_delegation.core.model import (
    CapValues,
    CostShares,
    Element,
    Instance,
    ModelKind,
    UtilityModel,
    build_instance,
    compute_caps,
    cost_shares,
)
from pandora_delegation.core.numerics import Estimate, approx_equal
from pandora_delegation.core.profiles import (
    RealizationProfile,
    enumerate_atom_profiles,
    sample_profile,
    sample_profile_batch,
    truncated_value,
)
from pandora_delegation.core.validation import ValidationReport, validate_instance

__all__ = [
    "AcceptanceRule",
    "Atom",
    "CapValues",
    "CostShares",
    "Element",
    "Estimate",
    "FiniteJointDistribution",
    "Instance",
    "ModelKind",
    "OutcomeSetRule",
    "Piece",
    "RealizationProfile",
    "ThresholdRule",
    "UtilityModel",
    "ValidationReport",
    "acceptance_probability",
    "approx_equal",
    "build_instance",
    "cap_value",
    "clamp_nonpositive_threshold",
    "compute_caps",
    "cost_shares",
    "enumerate_atom_profiles",
    "expected_excess",
    "refine_outcomes",
    "sample_profile",
    "sample_profile_batch",
    "truncated_value",
    "validate_instance",
]
