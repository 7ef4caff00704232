"""Tests for single-proposal mechanisms and their constructors.

Run from project root:
    pytest pandora_delegation/tests/test_mechanisms.py -v
"""

from __future__ import annotations

import math

import pytest

from pandora_delegation.agents.policies import AgentKind, AgentPolicy
from pandora_delegation.agents.simulator import simulate_interaction
from pandora_delegation.constraints.oracles import KUniform
from pandora_delegation.core.model import ModelKind, UtilityModel, build_instance
from pandora_delegation.errors import BadParameters, ModelMismatch, UnsupportedConstraint
from pandora_delegation.harness.families import FamilyId
from pandora_delegation.mechanisms.builders import (
    accept_all_mechanism,
    acceptance_mass,
    build_binary_matroid,
    build_free_agent_kuniform,
    build_free_agent_ocrs,
    build_shared_cost,
    outcome_pattern_mechanism,
    shared_cost_split,
)
from pandora_delegation.mechanisms.mechanism import Outcome
from pandora_delegation.ocrs.ex_ante import ex_ante_membership
from pandora_delegation.ocrs.greedy import KNAPSACK_ALPHA, MATROID_ALPHA, build_greedy_ocrs
from pandora_delegation.solvers.surrogate import exact_opt_value, opt_surrogate

# two_boxes atoms: element 0 -> (4, 4), (0, 0); element 1 -> (2, 2), (0, 0)
BIG_0 = Outcome(0, 0, 4.0, 4.0, 0.5)
ZERO_0 = Outcome(0, 1, 0.0, 0.0, 0.5)
BIG_1 = Outcome(1, 0, 2.0, 2.0, 0.5)


@pytest.fixture
def free_two_boxes(two_boxes):
    return two_boxes.with_model(UtilityModel(ModelKind.FREE_AGENT))


@pytest.fixture
def shared_two_boxes(two_boxes):
    return two_boxes.with_model(UtilityModel(ModelKind.SHARED_COST))


# =============================================================================
# Acceptance
# =============================================================================

def test_accept_all_takes_any_feasible_proposal(two_boxes):
    mech = accept_all_mechanism(two_boxes)
    assert mech.accepts([])
    assert mech.accepts([BIG_0])
    assert mech.accepts([ZERO_0])


def test_infeasible_proposal_rejected(two_boxes):
    mech = accept_all_mechanism(two_boxes)
    assert not mech.accepts([BIG_0, BIG_1])


def test_duplicate_element_rejected(two_boxes):
    mech = accept_all_mechanism(two_boxes)
    assert not mech.accepts([BIG_0, ZERO_0])


def test_outcome_pattern(two_boxes):
    mech = outcome_pattern_mechanism(two_boxes, [frozenset({0}), frozenset()])
    assert mech.whitelist == frozenset({0})
    assert mech.accepts([BIG_0])
    assert not mech.accepts([ZERO_0])
    assert not mech.accepts([BIG_1])
    assert mech.is_monotone(two_boxes)
    assert mech.provenance.params["patterns"] == [[0], []]


def test_pattern_rejecting_high_outcome_is_not_monotone(two_boxes):
    mech = outcome_pattern_mechanism(two_boxes, [frozenset({1}), frozenset({0, 1})])
    assert not mech.is_monotone(two_boxes)


def test_acceptance_mass(two_boxes):
    mech = outcome_pattern_mechanism(two_boxes, [frozenset({0}), frozenset()])
    assert acceptance_mass(two_boxes, mech, 0) == pytest.approx(0.25)
    assert acceptance_mass(two_boxes, mech, 1) == 0.0


# =============================================================================
# Binary model
# =============================================================================

def test_single_element_accepts_exactly_the_nonzero_outcome():
    instance = build_instance(
        [[(2.0, 2.0, 0.5), (0.0, 0.0, 0.5)]], [0.25], KUniform(1, 1), UtilityModel(ModelKind.BINARY)
    )
    mech = build_binary_matroid(instance)
    assert mech.whitelist == frozenset({0})
    assert mech.accepts([Outcome(0, 0, 2.0, 2.0, 0.99)])
    assert not mech.accepts([Outcome(0, 1, 0.0, 0.0, 0.01)])


def test_thresholds_and_whitelist(binary_instance):
    mech = build_binary_matroid(binary_instance)
    assert mech.whitelist == frozenset({0, 1, 2})
    pairs = mech.threshold_pairs()
    assert [t for t, _ in pairs] == pytest.approx([3.0, 2.0, 1.5])
    assert all(q == 1.0 for _, q in pairs)
    assert mech.is_monotone(binary_instance)
    assert acceptance_mass(binary_instance, mech, 2) == pytest.approx(0.5)


def test_index_agent_meets_quarter_of_optimum(binary_instance):
    mech = build_binary_matroid(binary_instance)
    result = simulate_interaction(binary_instance, mech, AgentPolicy(AgentKind.WEITZMAN_INDEX), exact=True)
    opt = exact_opt_value(binary_instance)
    assert opt == pytest.approx(3.0625)
    # agent probes elements 2 and 1 and proposes whichever are positive
    assert result.delegated.mean == pytest.approx(1.75)
    assert result.delegated.mean >= MATROID_ALPHA * opt


def test_standard_model_rejected(two_boxes):
    with pytest.raises(ModelMismatch):
        build_binary_matroid(two_boxes)


def test_knapsack_family_rejected(knapsack_gap):
    binary = knapsack_gap.with_model(UtilityModel(ModelKind.BINARY))
    with pytest.raises(UnsupportedConstraint):
        build_binary_matroid(binary)


# =============================================================================
# Free agent
# =============================================================================

def test_global_threshold(free_two_boxes):
    mech = build_free_agent_kuniform(free_two_boxes, 0.5)
    assert mech.whitelist == frozenset({0, 1})
    assert mech.evaluation_discount == 0.5
    assert mech.provenance.params["threshold"] == pytest.approx(1.5)
    assert mech.provenance.params["q"] == pytest.approx(2.0 / 3.0)
    assert mech.shares(free_two_boxes).agent == (0.0, 0.0)
    assert mech.shares(free_two_boxes).principal == pytest.approx((0.25, 0.125))


def test_adversarial_agent_meets_delta_of_optimum(free_two_boxes):
    mech = build_free_agent_kuniform(free_two_boxes, 0.5)
    result = simulate_interaction(free_two_boxes, mech, AgentPolicy(AgentKind.ADVERSARIAL_MAXIMAL), exact=True)
    assert result.delegated.mean == pytest.approx(4.0 / 3.0 - 0.375)
    assert result.delegated.mean >= 0.5 * 1.0625


def test_favoring_agent_does_better(free_two_boxes):
    mech = build_free_agent_kuniform(free_two_boxes, 0.5)
    result = simulate_interaction(free_two_boxes, mech, AgentPolicy(AgentKind.FAVOR_PRINCIPAL_MAXIMAL), exact=True)
    assert result.delegated.mean == pytest.approx(1.125)


def test_zero_delta_whitelists_nothing(free_two_boxes):
    mech = build_free_agent_kuniform(free_two_boxes, 0.0)
    assert mech.whitelist == frozenset()
    assert mech.provenance.params["threshold"] is None


def test_delta_out_of_range(free_two_boxes):
    with pytest.raises(BadParameters):
        build_free_agent_kuniform(free_two_boxes, 0.7)


def test_requires_free_agent_model(two_boxes):
    with pytest.raises(ModelMismatch):
        build_free_agent_kuniform(two_boxes, 0.5)


def test_ocrs_construction(free_two_boxes):
    p = ex_ante_membership(free_two_boxes)
    family = build_greedy_ocrs(free_two_boxes, p)
    mech = build_free_agent_ocrs(free_two_boxes, p, family)
    assert mech.whitelist == frozenset({0, 1})
    assert mech.evaluation_discount == pytest.approx(1.0 - MATROID_ALPHA)
    assert mech.threshold_pairs()[0] == pytest.approx((2.0, 0.5))


def test_ocrs_member_out_of_range(free_two_boxes):
    p = ex_ante_membership(free_two_boxes)
    family = build_greedy_ocrs(free_two_boxes, p)
    with pytest.raises(BadParameters):
        build_free_agent_ocrs(free_two_boxes, p, family, member=5)


# =============================================================================
# Shared cost
# =============================================================================

def test_split_by_expected_agent_value(shared_two_boxes):
    split = shared_cost_split(shared_two_boxes)
    assert split.d == pytest.approx((0.5, 0.5))
    assert split.low == frozenset({0})
    assert split.high == frozenset({1})
    assert split.surrogate_low == pytest.approx(0.5)
    assert split.surrogate_high == pytest.approx(0.75)
    assert split.surrogate_all == pytest.approx(1.0625)
    assert split.branch == "high"


def test_high_branch_mechanism(shared_two_boxes):
    mech = build_shared_cost(shared_two_boxes)
    assert mech.whitelist == frozenset({1})
    assert mech.cost_division == pytest.approx((0.5, 0.25))
    assert mech.threshold_pairs()[0] is None
    assert mech.threshold_pairs()[1] == pytest.approx((1.5, 0.5))
    assert mech.provenance.params["branch"] == "high"


def test_agent_best_response_meets_guarantee(shared_two_boxes):
    mech = build_shared_cost(shared_two_boxes)
    result = simulate_interaction(shared_two_boxes, mech, AgentPolicy(AgentKind.EXACT_DP))
    assert result.delegated.mean == pytest.approx(0.5)
    assert result.agent.mean == pytest.approx(0.25)
    assert result.delegated.mean >= MATROID_ALPHA / 2 * 1.0625


def test_requires_shared_cost_model(two_boxes):
    with pytest.raises(ModelMismatch):
        shared_cost_split(two_boxes)


def test_low_branch_charges_expected_value():
    # element 1's agent value is small, so d_1 stays below its cost
    instance = build_instance(
        [
            [(4.0, 4.0, 0.25), (0.0, 0.0, 0.75)],
            [(2.0, 0.2, 0.5), (0.0, 0.0, 0.5)],
        ],
        [0.5, 0.25],
        KUniform(2, 1),
        UtilityModel(ModelKind.SHARED_COST),
    )
    split = shared_cost_split(instance)
    assert split.d == pytest.approx((0.5, 0.05))
    assert split.low == frozenset({0, 1})
    assert split.branch == "low"
    mech = build_shared_cost(instance)
    assert mech.whitelist == frozenset({0, 1})
    assert mech.cost_division == pytest.approx((0.5, 0.05))
    assert not math.isinf(mech.threshold_pairs()[1][0])


# =============================================================================
# Guarantees on random instances
# =============================================================================

def _exact(instance, mech, kind: AgentKind):
    return simulate_interaction(instance, mech, AgentPolicy(kind), exact=True)


def test_binary_guarantee_on_random_partitions(random_instances):
    for instance in random_instances(FamilyId.RANDOM_MATROID, 4, range(40), model="binary", kind="partition"):
        mech = build_binary_matroid(instance)
        delegated = _exact(instance, mech, AgentKind.WEITZMAN_INDEX).delegated.mean
        assert delegated >= MATROID_ALPHA * exact_opt_value(instance) - 1e-9, instance.name


def test_global_threshold_guarantee_on_random_instances(random_instances):
    for instance in random_instances(FamilyId.RANDOM_MATROID, 4, range(40), model="free_agent", kind="k_uniform", k=2):
        mech = build_free_agent_kuniform(instance, 0.5)
        delegated = _exact(instance, mech, AgentKind.ADVERSARIAL_MAXIMAL).delegated.mean
        assert delegated >= 0.5 * exact_opt_value(instance) - 1e-9, instance.name


@pytest.mark.parametrize(
    "family_id, params, alpha",
    [
        (FamilyId.RANDOM_MATROID, {"kind": "partition", "blocks": 2}, MATROID_ALPHA),
        (FamilyId.RANDOM_KNAPSACK, {}, KNAPSACK_ALPHA),
    ],
    ids=["partition", "knapsack"],
)
def test_ocrs_mixture_guarantee_on_random_instances(random_instances, family_id, params, alpha):
    for instance in random_instances(family_id, 4, range(30), model="free_agent", **params):
        p = ex_ante_membership(instance)
        family = build_greedy_ocrs(instance, p)
        assert family.nominal_alpha == pytest.approx(alpha)
        mixture = 0.0
        for member, weight in enumerate(family.weights):
            mech = build_free_agent_ocrs(instance, p, family, member=member)
            assert mech.evaluation_discount == pytest.approx(1.0 - alpha)
            mixture += weight * _exact(instance, mech, AgentKind.ADVERSARIAL_MAXIMAL).delegated.mean
        assert mixture >= alpha * exact_opt_value(instance) - 1e-9, instance.name


@pytest.mark.parametrize(
    "params",
    [{"kind": "k_uniform", "k": 2}, {"kind": "partition", "blocks": 2}],
    ids=["k_uniform", "partition"],
)
def test_shared_cost_guarantee_on_random_matroids(random_instances, params):
    for instance in random_instances(FamilyId.RANDOM_MATROID, 4, range(30), model="shared_cost", **params):
        split = shared_cost_split(instance)
        kept = split.low | split.high
        # the optimum over both sides never exceeds the two sides taken separately
        assert split.surrogate_low + split.surrogate_high >= opt_surrogate(instance, restrict_to=kept).mean - 1e-9
        mech = build_shared_cost(instance)
        delegated = _exact(instance, mech, AgentKind.EXACT_DP).delegated.mean
        assert delegated >= MATROID_ALPHA / 2 * exact_opt_value(instance) - 1e-9, instance.name


def test_low_branch_leaves_agent_no_surplus(random_instances):
    low_branches = 0
    for instance in random_instances(
        FamilyId.RANDOM_MATROID, 4, range(30), model="shared_cost", kind="k_uniform", k=2, cost_fraction=0.9
    ):
        mech = build_shared_cost(instance)
        if mech.provenance.params["branch"] != "low":
            continue
        low_branches += 1
        for i in mech.whitelist:
            rule = mech.rules[i]
            expected_value = sum(
                a.p * a.y * rule.acceptance_fraction(a.x, idx) for idx, a in enumerate(instance.dist(i).atoms)
            )
            assert mech.cost_division[i] == pytest.approx(expected_value, abs=1e-9), instance.name
        for i in set(range(instance.n)) - mech.whitelist:
            assert mech.cost_division[i] == instance.costs[i]
    assert low_branches > 0
