"""Tests for agent best responses and the interaction simulator.

Run from project root:
    pytest pandora_delegation/tests/test_agents.py -v
"""

from __future__ import annotations

import pytest

from pandora_delegation.agents.best_response import (
    Action,
    best_response_dp,
    evaluate_strategy,
    play_strategy,
)
from pandora_delegation.agents.free_agents import favor_principal_free_agent, worst_case_free_agent
from pandora_delegation.agents.index_agent import AgentPlay, weitzman_index_agent
from pandora_delegation.agents.outcomes import agent_pieces, masked_agent_law
from pandora_delegation.agents.policies import AgentKind, AgentPolicy, TieBreaking, replaces
from pandora_delegation.agents.sequential import sequential_best_response
from pandora_delegation.agents.simulator import settle, simulate_interaction
from pandora_delegation.constraints.oracles import KUniform
from pandora_delegation.core.model import ModelKind, UtilityModel
from pandora_delegation.core.profiles import RealizationProfile
from pandora_delegation.errors import BadParameters, ModelMismatch, NotPandoraShaped, TooLarge
from pandora_delegation.mechanisms.builders import (
    accept_all_mechanism,
    build_binary_matroid,
    outcome_pattern_mechanism,
)

TWO_BOXES_OPT = 1.0625


@pytest.fixture
def accept_all(two_boxes):
    return accept_all_mechanism(two_boxes)


# =============================================================================
# Tie-breaking and pieces
# =============================================================================

def test_agent_value_decides_first():
    for tie in TieBreaking:
        assert replaces(tie, (2.0, 0.0), (1.0, 5.0))
        assert not replaces(tie, (1.0, 5.0), (2.0, 0.0))


def test_indifferent_agent():
    assert replaces(TieBreaking.FAVOR_PRINCIPAL, (1.0, 2.0), (1.0, 1.0))
    assert not replaces(TieBreaking.AGAINST_PRINCIPAL, (1.0, 2.0), (1.0, 1.0))
    assert replaces(TieBreaking.AGAINST_PRINCIPAL, (1.0, 1.0), (1.0, 2.0))
    assert not replaces(TieBreaking.LOWEST_ID, (1.0, 2.0), (1.0, 1.0))


def test_full_tie_keeps_incumbent():
    assert not replaces(TieBreaking.FAVOR_PRINCIPAL, (1.0, 1.0), (1.0, 1.0 + 1e-12))


def test_rejected_outcomes_collapse(two_boxes):
    mech = outcome_pattern_mechanism(two_boxes, [frozenset({0}), frozenset()])
    pieces = agent_pieces(two_boxes, mech, 0)
    assert [(p.prob, p.accepted) for p in pieces] == [(0.25, True), (0.75, False)]
    assert masked_agent_law(pieces) == ((0.0, 0.75), (4.0, 0.25))


def test_non_whitelisted_element_is_one_rejected_piece(two_boxes):
    mech = outcome_pattern_mechanism(two_boxes, [frozenset({0}), frozenset()])
    pieces = agent_pieces(two_boxes, mech, 1)
    assert len(pieces) == 1
    assert not pieces[0].accepted
    assert pieces[0].prob == pytest.approx(1.0)


# =============================================================================
# Exact best response
# =============================================================================

def test_accept_all_matches_the_optimum(two_boxes, accept_all):
    response = best_response_dp(two_boxes, accept_all)
    assert response.agent_utility == pytest.approx(TWO_BOXES_OPT)
    assert response.principal_utility == pytest.approx(TWO_BOXES_OPT)
    assert response.strategy.decisions[(-1, -1)] == Action("probe", element=0)


def test_strategy_replay(two_boxes, accept_all):
    strategy = best_response_dp(two_boxes, accept_all).strategy
    # piece 1 of element 0 is the (4, 4) outcome
    assert play_strategy(strategy, (1, 0)) == ((0,), frozenset({0}))
    assert play_strategy(strategy, (0, 1)) == ((0, 1), frozenset({1}))


def test_evaluate_strategy_agrees(two_boxes, accept_all):
    response = best_response_dp(two_boxes, accept_all)
    agent, principal = evaluate_strategy(two_boxes, accept_all, response.strategy)
    assert agent == pytest.approx(response.agent_utility)
    assert principal == pytest.approx(response.principal_utility)


def test_restricted_whitelist_limits_the_agent(two_boxes):
    mech = outcome_pattern_mechanism(two_boxes, [frozenset({0}), frozenset()])
    response = best_response_dp(two_boxes, mech)
    assert response.agent_utility == pytest.approx(0.25 * 4.0 - 0.5)
    assert response.principal_utility == pytest.approx(0.5)


def test_state_guard(two_boxes, accept_all):
    with pytest.raises(TooLarge):
        best_response_dp(two_boxes, accept_all, guard=1)


def test_agrees_with_dp_on_single_choice(two_boxes, accept_all):
    response = sequential_best_response(two_boxes, accept_all)
    assert response.order == (0, 1)
    assert response.agent_utility == pytest.approx(TWO_BOXES_OPT)
    assert response.principal_utility == pytest.approx(TWO_BOXES_OPT)


def test_needs_single_choice(two_boxes):
    wide = two_boxes.with_constraint(KUniform(2, 2))
    with pytest.raises(NotPandoraShaped):
        sequential_best_response(wide, accept_all_mechanism(wide))


# =============================================================================
# Per-profile agents
# =============================================================================

def test_probes_by_agent_cap(two_boxes, accept_all):
    play = weitzman_index_agent(two_boxes, accept_all, RealizationProfile.from_atoms(two_boxes, (1, 0)))
    assert play.probed == (0, 1)
    assert play.proposal == frozenset({1})


def test_expected_value_on_single_choice(two_boxes, accept_all):
    result = simulate_interaction(two_boxes, accept_all, AgentPolicy(AgentKind.WEITZMAN_INDEX), exact=True)
    assert result.delegated.exact
    assert result.delegated.mean == pytest.approx(TWO_BOXES_OPT)


def test_binary_agent_skips_zero_surplus_element(binary_instance):
    mech = build_binary_matroid(binary_instance)
    play = weitzman_index_agent(binary_instance, mech, RealizationProfile.from_atoms(binary_instance, (0, 0, 0)))
    assert play.probed == (2, 1)
    assert play.proposal == frozenset({1, 2})


@pytest.fixture
def free_two_boxes(two_boxes):
    return two_boxes.with_model(UtilityModel(ModelKind.FREE_AGENT))


def test_adversary_proposes_the_smaller_value(free_two_boxes):
    mech = accept_all_mechanism(free_two_boxes)
    profile = RealizationProfile.from_atoms(free_two_boxes, (0, 0))
    assert worst_case_free_agent(free_two_boxes, mech, profile).proposal == frozenset({1})
    assert favor_principal_free_agent(free_two_boxes, mech, profile).proposal == frozenset({0})


def test_free_agent_expected_values(free_two_boxes):
    mech = accept_all_mechanism(free_two_boxes)
    worst = simulate_interaction(free_two_boxes, mech, AgentPolicy(AgentKind.ADVERSARIAL_MAXIMAL), exact=True)
    best = simulate_interaction(free_two_boxes, mech, AgentPolicy(AgentKind.FAVOR_PRINCIPAL_MAXIMAL), exact=True)
    assert worst.delegated.mean == pytest.approx(-0.5)
    assert worst.agent.mean == pytest.approx(0.25)
    assert best.delegated.mean == pytest.approx(1.0)
    assert best.agent.mean == pytest.approx(1.75)


def test_standard_model_rejected(two_boxes, accept_all):
    with pytest.raises(ModelMismatch):
        worst_case_free_agent(two_boxes, accept_all, RealizationProfile.from_atoms(two_boxes, (0, 0)))


# =============================================================================
# Simulator
# =============================================================================

def test_threshold_following_agent(binary_instance):
    mech = build_binary_matroid(binary_instance)
    result = simulate_interaction(binary_instance, mech, AgentPolicy(AgentKind.PRESCRIBED_THRESHOLD), exact=True)
    assert result.delegated.mean == pytest.approx(3.0625)
    assert result.agent.mean == pytest.approx(1.4375)


def test_traces_cover_all_profiles(two_boxes, accept_all):
    result = simulate_interaction(
        two_boxes, accept_all, AgentPolicy(AgentKind.WEITZMAN_INDEX), exact=True, record_traces=True
    )
    assert len(result.traces) == 4
    assert sum(t.weight for t in result.traces) == pytest.approx(1.0)
    assert all(t.accepted for t in result.traces)


def test_sampled_run(two_boxes, accept_all):
    result = simulate_interaction(
        two_boxes, accept_all, AgentPolicy(AgentKind.WEITZMAN_INDEX), exact=False, samples=4000, seed=11
    )
    assert result.delegated.samples == 4000
    assert result.delegated.lo <= result.delegated.mean <= result.delegated.hi
    assert result.delegated.mean == pytest.approx(TWO_BOXES_OPT, abs=0.2)


def test_sampled_run_needs_seed(two_boxes, accept_all):
    with pytest.raises(BadParameters):
        simulate_interaction(two_boxes, accept_all, AgentPolicy(AgentKind.WEITZMAN_INDEX), exact=False)


def test_rejected_proposal_pays_costs_only(two_boxes):
    mech = outcome_pattern_mechanism(two_boxes, [frozenset({0}), frozenset()])
    profile = RealizationProfile.from_atoms(two_boxes, (0, 0))
    trace = settle(mech, mech.shares(two_boxes), profile, AgentPlay((0, 1), frozenset({1})))
    assert not trace.accepted
    assert trace.principal_utility == pytest.approx(-0.75)
    assert trace.agent_utility == pytest.approx(-0.75)


def test_dp_policy_is_exact(two_boxes, accept_all):
    result = simulate_interaction(two_boxes, accept_all, AgentPolicy(AgentKind.EXACT_DP, TieBreaking.LOWEST_ID))
    assert result.delegated.exact
    assert result.delegated.mean == pytest.approx(TWO_BOXES_OPT)
