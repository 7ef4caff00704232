"""Greedy OCRS families built from an ex-ante vector.

A family is a weighted list of deterministic members.  Each member fixes an
activation vector x (a scaled copy of p on the member's elements), a
quantile threshold rule per active element, and the sub-family the greedy
scheme admits into.  A randomized scheme is the mixture over members.

| Constraint | Members (weight)                         | x_i          | nominal α  |
|------------|------------------------------------------|--------------|------------|
| k_uniform  | one (1)                                  | p_i / 2      | 1/4        |
| partition  | one (1)                                  | p_i / 2      | 1/4        |
| knapsack   | big (1/2): at most one big element       | p_i / 2      | 3/2 − √2   |
|            | small (1/2): knapsack over small elements| (1 − 1/√2)p_i|            |

Halving p keeps each selectability at least 1/2 for the matroid kinds, and
with quantiles taken at x_i the chance an element is above threshold is
exactly x_i, which gives the nominal α = (selectability)·(1/2).  An
element is "big" when its size exceeds half the budget.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import FrozenSet, Optional, Tuple

from pandora_delegation.constraints.oracles import (
    ConstraintOracle,
    Knapsack,
    KUniform,
    PartitionMatroid,
    restrict,
    unwrap,
)
from pandora_delegation.core.acceptance import ThresholdRule
from pandora_delegation.core.model import CapValues, Instance, compute_caps
from pandora_delegation.core.profiles import z_laws
from pandora_delegation.errors import UnsupportedConstraint
from pandora_delegation.ocrs.ex_ante import ExAnteVector
from pandora_delegation.ocrs.quantiles import quantile_threshold

logger = logging.getLogger(__name__)

MATROID_SCALE = 0.5
KNAPSACK_SMALL_SCALE = 1.0 - 1.0 / math.sqrt(2.0)
MATROID_ALPHA = 0.25
KNAPSACK_ALPHA = 1.5 - math.sqrt(2.0)


@dataclass(frozen=True)
class FamilyMember:
    label: str
    whitelist: FrozenSet[int]
    rules: Tuple[Optional[ThresholdRule], ...]
    activation: Tuple[float, ...]
    sub_family: ConstraintOracle

    def threshold_pairs(self) -> Tuple[Optional[Tuple[float, float]], ...]:
        return tuple(None if r is None else (r.t, r.q) for r in self.rules)


@dataclass(frozen=True)
class GreedyFamily:
    kind: str
    members: Tuple[FamilyMember, ...]
    weights: Tuple[float, ...]
    nominal_alpha: float
    ex_ante: Tuple[float, ...]

    @property
    def whitelist(self) -> FrozenSet[int]:
        out: FrozenSet[int] = frozenset()
        for m in self.members:
            out |= m.whitelist
        return out


def _member(
    label: str,
    instance: Instance,
    laws,
    caps: CapValues,
    activation: Tuple[float, ...],
    base_sub: ConstraintOracle,
) -> FamilyMember:
    rules = []
    whitelist = set()
    for i, x in enumerate(activation):
        if x <= 0:
            rules.append(None)
            continue
        t, q = quantile_threshold(laws[i], x)
        rules.append(ThresholdRule(t=max(t, 0.0), q=q, cap=caps.tau_x[i]))
        whitelist.add(i)
    return FamilyMember(label, frozenset(whitelist), tuple(rules), activation, restrict(base_sub, whitelist))


def build_greedy_ocrs(
    instance: Instance,
    p: ExAnteVector,
    caps: Optional[CapValues] = None,
    oracle: Optional[ConstraintOracle] = None,
) -> GreedyFamily:
    caps = caps or compute_caps(instance)
    base, allowed = unwrap(oracle or instance.constraint)
    laws = z_laws(instance, caps)
    pv = tuple(v if i in allowed else 0.0 for i, v in enumerate(p.p))

    if isinstance(base, (KUniform, PartitionMatroid)):
        activation = tuple(MATROID_SCALE * v for v in pv)
        member = _member("matroid", instance, laws, caps, activation, base)
        return GreedyFamily(base.kind.value, (member,), (1.0,), MATROID_ALPHA, pv)

    if isinstance(base, Knapsack):
        big = frozenset(i for i in range(base.n) if base.is_big(i))
        big_activation = tuple(MATROID_SCALE * v if i in big else 0.0 for i, v in enumerate(pv))
        small_activation = tuple(KNAPSACK_SMALL_SCALE * v if i not in big else 0.0 for i, v in enumerate(pv))
        members = (
            _member("big", instance, laws, caps, big_activation, restrict(KUniform(base.n, 1), big)),
            _member("small", instance, laws, caps, small_activation, restrict(base, frozenset(range(base.n)) - big)),
        )
        return GreedyFamily(base.kind.value, members, (0.5, 0.5), KNAPSACK_ALPHA, pv)

    raise UnsupportedConstraint(f"no greedy OCRS construction for {base.kind.value}")
