"""Prescribed threshold strategy for one family member of a greedy OCRS.

Walk the elements in the given order.  Probe element i only if it is in the
member's whitelist, it can still be added to the selected set, and its cap
τ^x_i passes the element's rule; accept the outcome if x_i passes the rule.
"""

from __future__ import annotations

from typing import Optional, Protocol, Sequence, Tuple

from pandora_delegation.constraints.oracles import ConstraintOracle
from pandora_delegation.core.acceptance import AcceptanceRule
from pandora_delegation.core.model import CapValues, Instance, compute_caps
from pandora_delegation.core.profiles import RealizationProfile
from pandora_delegation.solvers.weitzman import PolicyRun


class ThresholdMember(Protocol):
    whitelist: frozenset
    rules: Tuple[Optional[AcceptanceRule], ...]
    sub_family: ConstraintOracle


def threshold_strategy_run(
    instance: Instance,
    member: ThresholdMember,
    order: Sequence[int],
    profile: RealizationProfile,
    caps: Optional[CapValues] = None,
    costs: Optional[Sequence[float]] = None,
) -> PolicyRun:
    caps = caps or compute_caps(instance)
    costs = instance.costs if costs is None else tuple(costs)
    probed = []
    selected = frozenset()
    for i in order:
        rule = member.rules[i]
        if i not in member.whitelist or rule is None:
            continue
        if not member.sub_family.is_feasible(selected | {i}):
            continue
        if not rule.admits_value(caps.tau_x[i]):
            continue
        probed.append(i)
        if rule.accepts(profile.xs[i], profile.atoms[i], profile.tags[i]):
            selected = selected | {i}
    utility = sum(profile.xs[i] for i in selected) - sum(costs[i] for i in probed)
    return PolicyRun(tuple(probed), selected, utility)
