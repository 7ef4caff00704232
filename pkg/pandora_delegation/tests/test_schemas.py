"""Tests for the instance and mechanism JSON codecs.

Run from project root:
    pytest pandora_delegation/tests/test_schemas.py -v
"""

from __future__ import annotations

import json

import pytest

from pandora_delegation.agents.policies import AgentKind, AgentPolicy
from pandora_delegation.agents.simulator import simulate_interaction
from pandora_delegation.core.model import ModelKind
from pandora_delegation.errors import InstanceLoadError
from pandora_delegation.harness.families import FamilyId
from pandora_delegation.mechanisms.builders import (
    accept_all_mechanism,
    build_binary_matroid,
    build_free_agent_ocrs,
    build_shared_cost,
)
from pandora_delegation.ocrs.ex_ante import ex_ante_membership
from pandora_delegation.ocrs.greedy import KNAPSACK_ALPHA, build_greedy_ocrs
from pandora_delegation.schemas.instance import dump_instance, parse_instance
from pandora_delegation.schemas.mechanism import (
    dump_mechanism,
    mechanism_from_schema,
    mechanism_to_schema,
    parse_mechanism,
)
from pandora_delegation.solvers.surrogate import exact_opt_value


def _delegated(instance, mech, kind: AgentKind) -> float:
    return simulate_interaction(instance, mech, AgentPolicy(kind), exact=True).delegated.mean


def _assert_round_trip(instance, mech, kind: AgentKind):
    text = dump_mechanism(mech)
    parsed = parse_mechanism(text)
    assert dump_mechanism(parsed) == text
    assert parsed.whitelist == mech.whitelist
    assert parsed.cost_division == mech.cost_division
    assert parsed.evaluation_discount == mech.evaluation_discount
    assert parsed.sub_family.describe() == mech.sub_family.describe()
    assert _delegated(instance, parsed, kind) == pytest.approx(_delegated(instance, mech, kind), abs=1e-12)
    return parsed


# =============================================================================
# Mechanisms
# =============================================================================

def test_binary_mechanism_round_trip(binary_instance):
    mech = build_binary_matroid(binary_instance)
    parsed = _assert_round_trip(binary_instance, mech, AgentKind.WEITZMAN_INDEX)
    assert parsed.provenance.constructor == "binary_matroid"


def test_shared_cost_knapsack_round_trip(random_instances):
    instance = random_instances(FamilyId.RANDOM_KNAPSACK, 4, [3], model="shared_cost")[0]
    mech = build_shared_cost(instance, member=1)
    descriptor = mech.sub_family.describe()
    assert descriptor["kind"] == "restricted"
    assert descriptor["base"]["kind"] == "knapsack"
    parsed = _assert_round_trip(instance, mech, AgentKind.EXACT_DP)
    assert parsed.provenance.params["branch"] == mech.provenance.params["branch"]
    assert parsed.cost_division is not None


@pytest.mark.parametrize("member", [0, 1])
def test_free_agent_ocrs_round_trip(random_instances, member):
    instance = random_instances(FamilyId.RANDOM_KNAPSACK, 4, [5], model="free_agent")[0]
    p = ex_ante_membership(instance)
    family = build_greedy_ocrs(instance, p)
    mech = build_free_agent_ocrs(instance, p, family, member=member)
    parsed = _assert_round_trip(instance, mech, AgentKind.ADVERSARIAL_MAXIMAL)
    assert parsed.evaluation_discount == pytest.approx(1.0 - KNAPSACK_ALPHA)


def test_schema_objects_round_trip(two_boxes):
    mech = accept_all_mechanism(two_boxes)
    rebuilt = mechanism_from_schema(mechanism_to_schema(mech))
    assert mechanism_to_schema(rebuilt) == mechanism_to_schema(mech)


def test_uncapped_rules_serialize_as_null(binary_instance):
    payload = json.loads(dump_mechanism(build_binary_matroid(binary_instance)))
    for rule in payload["rules"]:
        if rule is not None:
            assert rule["type"] == "threshold"
            assert rule["cap"] is None or isinstance(rule["cap"], float)


@pytest.mark.parametrize("text", ["{}", "not json", '{"whitelist": [0], "rules": [{"type": "nope"}]}'])
def test_parse_mechanism_rejects_malformed(text):
    with pytest.raises(InstanceLoadError):
        parse_mechanism(text)


# =============================================================================
# Instances
# =============================================================================

@pytest.mark.parametrize("fixture_name", ["two_boxes", "knapsack_gap", "binary_instance"])
def test_instance_round_trip(request, fixture_name):
    instance = request.getfixturevalue(fixture_name)
    text = dump_instance(instance)
    parsed = parse_instance(text, strict=True)
    assert dump_instance(parsed) == text
    assert parsed.name == instance.name
    assert parsed.model.kind == instance.model.kind
    assert exact_opt_value(parsed) == pytest.approx(exact_opt_value(instance))


def test_random_instance_round_trip(random_instances):
    instance = random_instances(FamilyId.RANDOM_KNAPSACK, 4, [1], model="shared_cost")[0]
    parsed = parse_instance(dump_instance(instance), strict=True)
    assert parsed.model.kind is ModelKind.SHARED_COST
    assert parsed.costs == instance.costs
    assert parsed.constraint.describe() == instance.constraint.describe()


def test_restricted_constraint_has_no_file_form(random_instances):
    instance = random_instances(FamilyId.RANDOM_KNAPSACK, 4, [3], model="shared_cost")[0]
    mech = build_shared_cost(instance)
    with pytest.raises(InstanceLoadError):
        dump_instance(instance.with_constraint(mech.sub_family))
