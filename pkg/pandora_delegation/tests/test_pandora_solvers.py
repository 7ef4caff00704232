"""Tests for the non-delegated solvers: Weitzman policy, exact DP, surrogate
benchmark and the prescribed threshold strategy.

Run from project root:
    pytest pandora_delegation/tests/test_pandora_solvers.py -v
"""

from __future__ import annotations

from types import SimpleNamespace

import pytest

from pandora_delegation.constraints.oracles import KUniform
from pandora_delegation.core.acceptance import ThresholdRule
from pandora_delegation.core.model import build_instance
from pandora_delegation.core.profiles import RealizationProfile
from pandora_delegation.errors import BadParameters, NotMatroid, TooLarge
from pandora_delegation.harness.families import FamilyId
from pandora_delegation.solvers.exact_dp import dp_state_count, exact_optimal_dp
from pandora_delegation.solvers.surrogate import (
    exact_opt_value,
    expected_max_positive,
    opt_benchmark,
    opt_surrogate,
)
from pandora_delegation.solvers.threshold_strategy import threshold_strategy_run
from pandora_delegation.solvers.weitzman import expected_weitzman_utility, generalized_weitzman_policy

TWO_BOXES_OPT = 1.0625


def _wide_instance(n: int = 21):
    """2^n joint profiles: above the default profile guard for n >= 20."""
    return build_instance([[(2.0, 2.0, 0.5), (0.0, 0.0, 0.5)]] * n, [0.25] * n, KUniform(n, 2))


def test_probes_higher_cap_first_and_stops(two_boxes):
    run = generalized_weitzman_policy(two_boxes, RealizationProfile.from_atoms(two_boxes, (0, 0)))
    assert run.probed == (0,)
    assert run.selected == frozenset({0})
    assert run.utility == pytest.approx(3.5)


def test_continues_after_a_miss(two_boxes):
    run = generalized_weitzman_policy(two_boxes, RealizationProfile.from_atoms(two_boxes, (1, 0)))
    assert run.probed == (0, 1)
    assert run.selected == frozenset({1})
    assert run.utility == pytest.approx(1.25)


def test_expected_utility_matches_optimum(two_boxes):
    assert expected_weitzman_utility(two_boxes) == pytest.approx(TWO_BOXES_OPT)


def test_rejects_non_matroid(knapsack_gap):
    with pytest.raises(NotMatroid):
        expected_weitzman_utility(knapsack_gap)


def test_dp_agrees_with_index_policy_on_matroids(two_boxes):
    assert exact_optimal_dp(two_boxes) == pytest.approx(TWO_BOXES_OPT)
    assert exact_opt_value(two_boxes) == pytest.approx(TWO_BOXES_OPT)


def test_knapsack_adaptivity_gap(knapsack_gap):
    assert exact_opt_value(knapsack_gap) == pytest.approx(2.125)
    assert opt_surrogate(knapsack_gap).mean == pytest.approx(2.25)


def test_state_guard(knapsack_gap):
    assert dp_state_count(knapsack_gap) == 18
    with pytest.raises(TooLarge):
        exact_optimal_dp(knapsack_gap, guard=5)


def test_benchmark_is_exact_when_affordable(knapsack_gap):
    est = opt_benchmark(knapsack_gap)
    assert est.exact
    assert est.mean == pytest.approx(2.125)


@pytest.mark.parametrize(
    "params",
    [
        {"kind": "k_uniform", "k": 2},
        {"kind": "partition", "blocks": 2},
        {"kind": "graphic"},
    ],
    ids=["k_uniform", "partition", "graphic"],
)
def test_index_policy_is_optimal_on_random_matroids(random_instances, params):
    for instance in random_instances(FamilyId.RANDOM_MATROID, 4, range(70), **params):
        optimum = exact_optimal_dp(instance)
        assert expected_weitzman_utility(instance) == pytest.approx(optimum, abs=1e-9), instance.name
        assert optimum <= opt_surrogate(instance).mean + 1e-9, instance.name


def test_expected_max_positive():
    law = ((0.0, 0.5), (2.0, 0.5))
    assert expected_max_positive([law, law]) == pytest.approx(1.5)


def test_exact_single_choice(two_boxes):
    est = opt_surrogate(two_boxes)
    assert est.exact
    assert est.mean == pytest.approx(TWO_BOXES_OPT)


def test_restricted_surrogate(two_boxes):
    assert opt_surrogate(two_boxes, restrict_to=frozenset({1})).mean == pytest.approx(0.75)


def test_sampled_surrogate_is_close_and_reproducible(two_boxes):
    first = opt_surrogate(two_boxes, samples=20_000, seed=5, exact=False)
    second = opt_surrogate(two_boxes, samples=20_000, seed=5, exact=False)
    assert first == second
    assert first.samples == 20_000
    assert abs(first.mean - TWO_BOXES_OPT) < 0.03


def test_sampling_needs_a_seed(two_boxes):
    with pytest.raises(BadParameters):
        opt_surrogate(two_boxes, samples=100, exact=False)


def test_exact_flag_refuses_to_sample():
    with pytest.raises(TooLarge):
        opt_surrogate(_wide_instance(), exact=True)


def test_benchmark_falls_back_to_sampling():
    est = opt_benchmark(_wide_instance(), seed=3, samples=2_000)
    assert not est.exact
    assert est.samples == 2_000


def test_benchmark_without_seed_reraises():
    with pytest.raises(TooLarge):
        opt_benchmark(_wide_instance())


def test_walks_order_and_respects_sub_family(two_boxes):
    member = SimpleNamespace(
        whitelist=frozenset({0, 1}),
        rules=(ThresholdRule(t=1.0, cap=2.0), ThresholdRule(t=1.0, cap=1.5)),
        sub_family=KUniform(2, 1),
    )
    profile = RealizationProfile.from_atoms(two_boxes, (0, 0))
    run = threshold_strategy_run(two_boxes, member, (1, 0), profile)
    assert run.probed == (1,)
    assert run.selected == frozenset({1})
    assert run.utility == pytest.approx(1.75)


def test_skips_elements_whose_cap_cannot_pass(two_boxes):
    member = SimpleNamespace(
        whitelist=frozenset({0, 1}),
        rules=(ThresholdRule(t=3.0, q=1.0, cap=2.0), ThresholdRule(t=1.0, cap=1.5)),
        sub_family=KUniform(2, 1),
    )
    profile = RealizationProfile.from_atoms(two_boxes, (0, 1))
    run = threshold_strategy_run(two_boxes, member, (0, 1), profile)
    assert run.probed == (1,)
    assert run.selected == frozenset()
    assert run.utility == pytest.approx(-0.25)
