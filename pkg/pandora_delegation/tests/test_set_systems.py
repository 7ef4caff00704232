"""Tests for the downward-closed set systems and their max-weight routines.

Run from project root:
    pytest pandora_delegation/tests/test_set_systems.py -v
"""

from __future__ import annotations

import math

import pytest

from pandora_delegation.constraints.knapsack import knapsack_max_weight
from pandora_delegation.constraints.oracles import (
    BipartiteMatching,
    Knapsack,
    KUniform,
    PartitionMatroid,
    capacity_one,
    enumerate_feasible,
    graphic_matroid,
    is_matroid_kind,
    rank,
    restrict,
    unwrap,
)
from pandora_delegation.errors import BadParameters, NotMatroid, TooLarge


def test_k_uniform_greedy():
    chosen, value = KUniform(4, 2).max_weight_feasible([3.0, 0.0, 5.0, 1.0])
    assert chosen == frozenset({0, 2})
    assert value == 8.0


def test_ties_go_to_lowest_id():
    chosen, _ = KUniform(3, 1).max_weight_feasible([1.0, 1.0, 1.0])
    assert chosen == frozenset({0})


def test_non_positive_weights_never_selected():
    chosen, value = KUniform(3, 3).max_weight_feasible([-1.0, 0.0, 2.0])
    assert chosen == frozenset({2})
    assert value == 2.0


def test_partition():
    oracle = PartitionMatroid(4, [[0, 1], [2, 3]], [1, 1])
    assert oracle.max_weight_feasible([1.0, 2.0, 3.0, 4.0]) == (frozenset({1, 3}), 6.0)
    assert not oracle.is_feasible({0, 1})


def test_partition_must_cover_ground_set():
    with pytest.raises(BadParameters):
        PartitionMatroid(3, [[0, 1]], [1])


def test_graphic_triangle():
    oracle = graphic_matroid([(0, 1), (1, 2), (0, 2)])
    assert oracle.is_matroid
    assert not oracle.is_feasible({0, 1, 2})
    assert oracle.is_feasible({0, 2})
    assert rank(oracle, range(3)) == 2


def test_rank_of_k_uniform():
    assert rank(KUniform(5, 2), [0, 1, 4]) == 2


def test_out_of_range_subset_infeasible():
    assert not KUniform(2, 2).is_feasible({5})


def test_weight_length_checked():
    with pytest.raises(BadParameters):
        KUniform(2, 1).max_weight_feasible([1.0])


def test_knapsack_integer_dp():
    oracle = Knapsack([1.0, 0.5, 0.5], 1.0)
    assert not is_matroid_kind(oracle)
    assert oracle.max_weight_feasible([2.0, 1.5, 1.5]) == (frozenset({1, 2}), 3.0)


def test_knapsack_tie_prefers_smallest_id_tuple():
    chosen, value = Knapsack([1.0, 0.5, 0.5], 1.0).max_weight_feasible([2.0, 1.0, 1.0])
    assert chosen == frozenset({0})
    assert value == 2.0


def test_knapsack_branch_and_bound():
    chosen, value = knapsack_max_weight([math.sqrt(2.0) / 4, 0.5, 0.6], 1.0, [1.0, 1.0, 1.5])
    assert chosen == frozenset({0, 2})
    assert value == pytest.approx(2.5)


def test_knapsack_rank_undefined():
    with pytest.raises(NotMatroid):
        rank(Knapsack([0.5], 1.0), [0])


def test_knapsack_rejects_bad_budget():
    with pytest.raises(BadParameters):
        Knapsack([0.5], 0.0)


def test_big_items():
    oracle = Knapsack([0.6, 0.5, 0.2], 1.0)
    assert [oracle.is_big(i) for i in range(3)] == [True, False, False]


def test_bipartite_matching():
    oracle = BipartiteMatching([(0, 0), (0, 1), (1, 0)])
    assert not oracle.is_feasible({0, 1})
    chosen, value = oracle.max_weight_feasible([3.0, 2.0, 2.0])
    assert chosen == frozenset({1, 2})
    assert value == 4.0


@pytest.mark.parametrize(
    "edges, expected",
    [
        # path L0-R0-L1-R1: {0, 2} and {1} both weigh 2
        ([(0, 0), (1, 0), (1, 1)], frozenset({0, 2})),
        # same path with the middle edge numbered first
        ([(1, 0), (0, 0), (1, 1)], frozenset({0})),
    ],
)
def test_matching_ties_go_to_smallest_id_tuple(edges, expected):
    weights = [1.0, 1.0, 1.0]
    middle = edges.index((1, 0))
    weights[middle] = 2.0
    chosen, value = BipartiteMatching(edges).max_weight_feasible(weights)
    assert chosen == expected
    assert value == 2.0


def test_matching_agrees_with_enumeration():
    oracle = BipartiteMatching([(0, 0), (0, 1), (1, 0), (1, 1), (2, 1)])
    weights = [2.0, 1.0, 1.0, 2.0, 2.0]
    best = max(
        (sum(weights[i] for i in s), tuple(-i for i in sorted(s)), s)
        for s in enumerate_feasible(oracle)
    )
    chosen, value = oracle.max_weight_feasible(weights)
    assert value == best[0]
    assert chosen == best[2] == frozenset({0, 3})


def test_enumerate_feasible():
    sets = enumerate_feasible(KUniform(3, 1))
    assert sorted(sets, key=sorted) == [frozenset(), frozenset({0}), frozenset({1}), frozenset({2})]


def test_enumeration_guard():
    with pytest.raises(TooLarge):
        enumerate_feasible(KUniform(25, 1))


def test_restriction():
    oracle = restrict(KUniform(3, 2), {0, 1})
    assert oracle.is_matroid
    assert not oracle.is_feasible({2})
    assert oracle.max_weight_feasible([1.0, 1.0, 5.0]) == (frozenset({0, 1}), 2.0)
    assert len(list(oracle.enumerate_feasible())) == 4


def test_nested_restriction_flattens():
    base = KUniform(3, 1)
    nested = restrict(restrict(base, {0, 1}), {1, 2})
    assert nested.base is base
    assert unwrap(nested) == (base, frozenset({1}))


def test_capacity_one():
    assert capacity_one(restrict(KUniform(4, 1), {0}))
    assert not capacity_one(KUniform(4, 2))
    assert not capacity_one(Knapsack([0.5], 1.0))
