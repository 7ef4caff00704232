"""Single-proposal mechanisms.

The principal commits to an acceptable family: a whitelist E′, one
acceptance rule per element, and a sub-family oracle.  A proposal (a set of
realized outcomes) is accepted iff its elements are distinct, whitelisted,
form a set of the sub-family, and every outcome passes its element's rule.
The empty proposal is always accepted and is worth nothing to either side.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, FrozenSet, Iterable, NamedTuple, Optional, Sequence, Tuple

from pandora_delegation.constraints.oracles import ConstraintOracle
from pandora_delegation.core.acceptance import AcceptanceRule, ThresholdRule
from pandora_delegation.core.model import CostShares, Instance, cost_shares
from pandora_delegation.core.profiles import RealizationProfile


class Outcome(NamedTuple):
    element: int
    atom: int
    x: float
    y: float
    tag: float


def realized_outcomes(profile: RealizationProfile, elements: Iterable[int]) -> Tuple[Outcome, ...]:
    return tuple(
        Outcome(i, profile.atoms[i], profile.xs[i], profile.ys[i], profile.tags[i]) for i in sorted(elements)
    )


@dataclass(frozen=True)
class Provenance:
    constructor: str
    params: Dict[str, Any] = field(default_factory=dict)
    seed: Optional[int] = None


@dataclass(frozen=True)
class SingleProposalMechanism:
    whitelist: FrozenSet[int]
    rules: Tuple[Optional[AcceptanceRule], ...]
    sub_family: ConstraintOracle
    provenance: Provenance
    cost_division: Optional[Tuple[float, ...]] = None   # shared cost: agent's share per element
    evaluation_discount: Optional[float] = None         # δ′ applied to the principal's cost

    def rule_for(self, i: int) -> Optional[AcceptanceRule]:
        if i not in self.whitelist:
            return None
        return self.rules[i]

    def accepts(self, proposal: Iterable[Outcome]) -> bool:
        outcomes = list(proposal)
        elements = [o.element for o in outcomes]
        if len(set(elements)) != len(elements):
            return False
        if not set(elements) <= self.whitelist:
            return False
        if not self.sub_family.is_feasible(elements):
            return False
        for o in outcomes:
            rule = self.rules[o.element]
            if rule is None or not rule.accepts(o.x, o.atom, o.tag):
                return False
        return True

    def shares(self, instance: Instance) -> CostShares:
        """Cost split under this mechanism: its cost division and evaluation discount override the model's."""
        return cost_shares(instance, self.cost_division, self.evaluation_discount)

    def is_monotone(self, instance: Instance) -> bool:
        """Per element: accepting an atom implies accepting every atom with larger x."""
        for i, rule in enumerate(self.rules):
            if rule is None or i not in self.whitelist:
                continue
            atoms = instance.elements[i].dist.atoms
            fractions = [(a.x, rule.acceptance_fraction(a.x, idx)) for idx, a in enumerate(atoms)]
            for x_lo, f_lo in fractions:
                for x_hi, f_hi in fractions:
                    if x_hi > x_lo and f_hi < f_lo:
                        return False
        return True

    def threshold_pairs(self) -> Tuple[Optional[Tuple[float, float]], ...]:
        return tuple(
            (r.t, r.q) if isinstance(r, ThresholdRule) and i in self.whitelist else None
            for i, r in enumerate(self.rules)
        )


def accepts(mech: SingleProposalMechanism, proposal: Iterable[Outcome]) -> bool:
    return mech.accepts(proposal)
