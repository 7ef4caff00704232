"""Generalized Weitzman policy for matroid Pandora's box.

Lazy greedy over cap values: unprobed elements compete with their cap τ,
probed ones with κ = min(x, τ).  At each step the addable candidate with the
largest positive value wins (ties: lowest id); an unprobed winner is
probed, a probed winner is selected.  On matroids this policy is optimal
and its value equals E[max_{I ∈ 𝓘} Σ_{i∈I} κ_i].
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Dict, FrozenSet, Optional, Sequence, Tuple

from pandora_delegation.constraints.oracles import ConstraintOracle
from pandora_delegation.core.model import CapValues, Instance, compute_caps
from pandora_delegation.core.numerics import is_positive
from pandora_delegation.core.profiles import RealizationProfile, enumerate_atom_profiles
from pandora_delegation.errors import NotMatroid

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PolicyRun:
    probed: Tuple[int, ...]  # in probe order
    selected: FrozenSet[int]
    utility: float


def lazy_index_greedy(
    oracle: ConstraintOracle,
    caps: Sequence[float],
    realized: Sequence[float],
    eligible: Optional[FrozenSet[int]] = None,
) -> Tuple[Tuple[int, ...], FrozenSet[int]]:
    """Core loop shared with index-based agents: returns (probe order, selection)."""
    n = oracle.n
    pool = frozenset(range(n)) if eligible is None else eligible
    kappa: Dict[int, float] = {}
    probed = []
    selected: FrozenSet[int] = frozenset()
    while True:
        best_id, best_value = None, 0.0
        for i in sorted(pool):
            if i in selected or not oracle.is_feasible(selected | {i}):
                continue
            value = kappa[i] if i in kappa else caps[i]
            if not is_positive(value):
                continue
            if best_id is None or value > best_value:
                best_id, best_value = i, value
        if best_id is None:
            return tuple(probed), selected
        if best_id in kappa:
            selected = selected | {best_id}
        else:
            kappa[best_id] = min(realized[best_id], caps[best_id])
            probed.append(best_id)


def generalized_weitzman_policy(
    instance: Instance,
    profile: RealizationProfile,
    caps: Optional[CapValues] = None,
    costs: Optional[Sequence[float]] = None,
) -> PolicyRun:
    """Run the policy on one realized profile; costs default to the full element costs."""
    if not instance.constraint.is_matroid:
        raise NotMatroid(f"{instance.constraint.kind.value} is not a matroid")
    costs = instance.costs if costs is None else tuple(costs)
    caps = caps or compute_caps(instance, costs)
    probed, selected = lazy_index_greedy(instance.constraint, caps.tau_x, profile.xs)
    utility = sum(profile.xs[i] for i in selected) - sum(costs[i] for i in probed)
    return PolicyRun(probed, selected, utility)


def expected_weitzman_utility(instance: Instance, guard: Optional[int] = None) -> float:
    """Exact expectation by enumerating joint outcomes."""
    caps = compute_caps(instance)
    total = 0.0
    for atoms, prob in enumerate_atom_profiles(instance, guard):
        run = generalized_weitzman_policy(instance, RealizationProfile.from_atoms(instance, atoms), caps)
        total += prob * run.utility
    return total
