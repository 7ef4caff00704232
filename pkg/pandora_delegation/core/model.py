"""Instances, utility models, cap values and cost shares.

Utility models
--------------
    | kind         | agent pays            | principal pays        |
    |--------------|-----------------------|-----------------------|
    | standard     | (1 − δ)·c             | (1 − δ)·c             |
    | binary       | (1 − δ)·c             | (1 − δ)·c             |
    | free_agent   | 0                     | (1 − δ)·c             |
    | shared_cost  | c′ (cost division)    | c − c′                |

δ is the model discount (0 unless the instance says otherwise).  A mechanism
may override the cost division (shared cost) or record an evaluation
discount; ``cost_shares`` takes both as optional arguments.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence, Tuple

from pandora_delegation.constraints.oracles import ConstraintOracle
from pandora_delegation.core.distributions import FiniteJointDistribution, cap_value
from pandora_delegation.errors import BadParameters, ModelMismatch

logger = logging.getLogger(__name__)


class ModelKind(str, Enum):
    STANDARD = "standard"
    BINARY = "binary"
    FREE_AGENT = "free_agent"
    SHARED_COST = "shared_cost"


@dataclass(frozen=True)
class UtilityModel:
    kind: ModelKind = ModelKind.STANDARD
    discount: float = 0.0
    cost_division: Optional[Tuple[float, ...]] = None  # shared cost only: agent's share c′_i


@dataclass(frozen=True)
class Element:
    id: int
    dist: FiniteJointDistribution
    cost: float


@dataclass(frozen=True)
class Instance:
    elements: Tuple[Element, ...]
    constraint: ConstraintOracle
    model: UtilityModel = field(default_factory=UtilityModel)
    name: str = ""

    @property
    def n(self) -> int:
        return len(self.elements)

    @property
    def costs(self) -> Tuple[float, ...]:
        return tuple(e.cost for e in self.elements)

    def dist(self, i: int) -> FiniteJointDistribution:
        return self.elements[i].dist

    def with_model(self, model: UtilityModel) -> "Instance":
        return Instance(self.elements, self.constraint, model, self.name)

    def with_constraint(self, constraint: ConstraintOracle) -> "Instance":
        return Instance(self.elements, constraint, self.model, self.name)


def build_instance(
    atoms_per_element: Sequence[Sequence[Sequence[float]]],
    costs: Sequence[float],
    constraint: ConstraintOracle,
    model: Optional[UtilityModel] = None,
    name: str = "",
    strict: bool = True,
) -> Instance:
    """Convenience constructor from raw ``(x, y, p)`` triples."""
    if len(atoms_per_element) != len(costs):
        raise BadParameters("one cost per element is required")
    make = FiniteJointDistribution.of if strict else FiniteJointDistribution.lenient
    elements = tuple(
        Element(i, make(atoms), float(c)) for i, (atoms, c) in enumerate(zip(atoms_per_element, costs))
    )
    return Instance(elements, constraint, model or UtilityModel(), name)


# ---------------------------------------------------------------------------
# Cap values
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CapValues:
    tau_x: Tuple[float, ...]
    tau_y: Tuple[float, ...]


def compute_caps(instance: Instance, costs: Optional[Sequence[float]] = None) -> CapValues:
    """Principal and agent cap values at the given costs (instance costs by default).

    Negative caps are allowed here: an element whose cost exceeds its mean
    simply never gets probed by an index policy.
    """
    costs = instance.costs if costs is None else tuple(costs)
    tau_x = tuple(cap_value(e.dist.marginal_x(), c, allow_negative=True) for e, c in zip(instance.elements, costs))
    tau_y = tuple(cap_value(e.dist.marginal_y(), c, allow_negative=True) for e, c in zip(instance.elements, costs))
    return CapValues(tau_x, tau_y)


# ---------------------------------------------------------------------------
# Cost shares
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CostShares:
    agent: Tuple[float, ...]
    principal: Tuple[float, ...]


def cost_shares(
    instance: Instance,
    cost_division: Optional[Sequence[float]] = None,
    discount: Optional[float] = None,
) -> CostShares:
    model = instance.model
    delta = model.discount if discount is None else discount
    if not 0.0 <= delta <= 1.0:
        raise BadParameters(f"discount must lie in [0, 1], got {delta!r}")
    costs = instance.costs

    if model.kind is ModelKind.SHARED_COST:
        if delta != 0.0:
            raise ModelMismatch("the shared-cost model does not take a discount")
        division = cost_division if cost_division is not None else model.cost_division
        agent = tuple(costs) if division is None else tuple(float(v) for v in division)
        if len(agent) != len(costs):
            raise BadParameters("cost division needs one entry per element")
        return CostShares(agent, tuple(c - a for c, a in zip(costs, agent)))

    principal = tuple((1.0 - delta) * c for c in costs)
    if model.kind is ModelKind.FREE_AGENT:
        return CostShares(tuple(0.0 for _ in costs), principal)
    return CostShares(principal, principal)
