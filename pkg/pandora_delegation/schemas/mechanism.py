"""Mechanism JSON: whitelist, per-element rules, sub-family, cost division, provenance."""

from __future__ import annotations

import json
import math
from typing import Annotated, Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, Field, ValidationError

from pandora_delegation.core.acceptance import OutcomeSetRule, ThresholdRule
from pandora_delegation.errors import InstanceLoadError
from pandora_delegation.mechanisms.mechanism import Provenance, SingleProposalMechanism
from pandora_delegation.schemas.instance import oracle_from_descriptor


class ThresholdRuleSchema(BaseModel):
    type: Literal["threshold"] = "threshold"
    t: float
    q: float = Field(1.0, ge=0.0, le=1.0)
    cap: Optional[float] = None  # null = uncapped


class OutcomeSetRuleSchema(BaseModel):
    type: Literal["outcomes"] = "outcomes"
    atoms: List[int]


RuleSchema = Annotated[Union[ThresholdRuleSchema, OutcomeSetRuleSchema], Field(discriminator="type")]


class ProvenanceSchema(BaseModel):
    constructor: str
    params: Dict[str, Any] = Field(default_factory=dict)
    seed: Optional[int] = None


class MechanismSchema(BaseModel):
    whitelist: List[int]
    rules: List[Optional[RuleSchema]]
    sub_family: Dict[str, Any]
    cost_division: Optional[List[float]] = None
    evaluation_discount: Optional[float] = None
    provenance: ProvenanceSchema


def _rule_to_schema(rule) -> Optional[RuleSchema]:
    if rule is None:
        return None
    if isinstance(rule, OutcomeSetRule):
        return OutcomeSetRuleSchema(atoms=sorted(rule.atoms))
    if math.isinf(rule.t):
        return None
    return ThresholdRuleSchema(t=rule.t, q=rule.q, cap=None if math.isinf(rule.cap) else rule.cap)


def _rule_from_schema(schema: Optional[RuleSchema]):
    if schema is None:
        return None
    if isinstance(schema, OutcomeSetRuleSchema):
        return OutcomeSetRule(frozenset(schema.atoms))
    return ThresholdRule(schema.t, schema.q, math.inf if schema.cap is None else schema.cap)


def mechanism_to_schema(mech: SingleProposalMechanism) -> MechanismSchema:
    return MechanismSchema(
        whitelist=sorted(mech.whitelist),
        rules=[_rule_to_schema(r) for r in mech.rules],
        sub_family=mech.sub_family.describe(),
        cost_division=None if mech.cost_division is None else list(mech.cost_division),
        evaluation_discount=mech.evaluation_discount,
        provenance=ProvenanceSchema(
            constructor=mech.provenance.constructor,
            params=dict(mech.provenance.params),
            seed=mech.provenance.seed,
        ),
    )


def mechanism_from_schema(schema: MechanismSchema) -> SingleProposalMechanism:
    return SingleProposalMechanism(
        whitelist=frozenset(schema.whitelist),
        rules=tuple(_rule_from_schema(r) for r in schema.rules),
        sub_family=oracle_from_descriptor(schema.sub_family),
        provenance=Provenance(schema.provenance.constructor, dict(schema.provenance.params), schema.provenance.seed),
        cost_division=None if schema.cost_division is None else tuple(schema.cost_division),
        evaluation_discount=schema.evaluation_discount,
    )


def dump_mechanism(mech: SingleProposalMechanism) -> str:
    return json.dumps(mechanism_to_schema(mech).model_dump(mode="json"), sort_keys=True, indent=2)


def parse_mechanism(text: str) -> SingleProposalMechanism:
    try:
        schema = MechanismSchema.model_validate_json(text)
    except ValidationError as exc:
        raise InstanceLoadError(f"mechanism: {exc.errors()[0]['msg']}") from exc
    return mechanism_from_schema(schema)
