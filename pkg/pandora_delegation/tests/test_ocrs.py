"""Tests for ex-ante vectors, quantile thresholds, greedy OCRS families and
their selectability.

Run from project root:
    pytest pandora_delegation/tests/test_ocrs.py -v
"""

from __future__ import annotations

import math

import numpy as np
import pytest

from pandora_delegation.constraints.oracles import BipartiteMatching, KUniform, PartitionMatroid
from pandora_delegation.core.model import build_instance
from pandora_delegation.errors import BadParameters, TooLarge, UnsupportedConstraint
from pandora_delegation.harness.families import FamilyId
from pandora_delegation.ocrs.ex_ante import (
    ExAnteVector,
    concave_objective,
    ex_ante_concave,
    ex_ante_membership,
    in_polytope,
)
from pandora_delegation.ocrs.greedy import KNAPSACK_ALPHA, MATROID_ALPHA, build_greedy_ocrs
from pandora_delegation.ocrs.quantiles import quantile_threshold, top_mass_value
from pandora_delegation.ocrs.selectability import estimate_selectability
from pandora_delegation.schemas.instance import load_instance
from pandora_delegation.solvers.surrogate import opt_surrogate

HALF_AT_TWO = ((0.0, 0.5), (2.0, 0.5))


def test_threshold_inside_top_atom():
    assert quantile_threshold(HALF_AT_TWO, 0.25) == (2.0, 0.5)


def test_threshold_reaching_lower_atom():
    assert quantile_threshold(HALF_AT_TWO, 0.75) == (0.0, 0.5)


def test_zero_mass():
    assert quantile_threshold(HALF_AT_TWO, 0.0) == (2.0, 0.0)


def test_mass_out_of_range():
    with pytest.raises(BadParameters):
        quantile_threshold(HALF_AT_TWO, 1.5)


def test_top_mass_value():
    assert top_mass_value(HALF_AT_TWO, 0.25) == pytest.approx(0.5)
    assert top_mass_value(HALF_AT_TWO, 0.75) == pytest.approx(1.0)
    assert top_mass_value(HALF_AT_TWO, 0.0) == 0.0


def test_single_choice_closed_form(two_boxes):
    p = ex_ante_membership(two_boxes)
    assert p.method == "closed_form"
    assert p.p == pytest.approx((0.25, 0.375))
    assert in_polytope(two_boxes.constraint, p.p)


def test_enumeration_on_knapsack(knapsack_gap):
    p = ex_ante_membership(knapsack_gap)
    assert p.method == "enumeration"
    assert p.p == pytest.approx((0.75, 0.25, 0.25))


def test_sampled_membership(two_boxes):
    p = ex_ante_membership(two_boxes, samples=20_000, seed=2, exact=False)
    assert p.method == "sampled"
    assert p.samples == 20_000
    assert p.p[0] == pytest.approx(0.25, abs=0.02)
    assert p.p[1] == pytest.approx(0.375, abs=0.02)


def test_sampled_membership_needs_seed(two_boxes):
    with pytest.raises(BadParameters):
        ex_ante_membership(two_boxes, exact=False)


def test_partition_membership_is_feasible(data_dir):
    instance = load_instance(data_dir / "partition_small.json")
    p = ex_ante_membership(instance)
    assert p.method == "enumeration"
    assert in_polytope(instance.constraint, p.p)


def test_concave_greedy_allocation(two_boxes):
    q = ex_ante_concave(two_boxes)
    assert q.method == "greedy"
    assert q.p == pytest.approx((0.25, 0.5))
    # relaxation value bounds the surrogate from above
    assert concave_objective(two_boxes, q.p) == pytest.approx(1.25)
    assert concave_objective(two_boxes, q.p) >= opt_surrogate(two_boxes).mean


def test_concave_partition_respects_blocks():
    instance = build_instance(
        [[(2.0, 2.0, 0.5), (0.0, 0.0, 0.5)]] * 4, [0.25] * 4, PartitionMatroid(4, [[0, 1], [2, 3]], [1, 1])
    )
    q = ex_ante_concave(instance)
    assert q.p[0] + q.p[1] <= 1.0 + 1e-12
    assert q.p[2] + q.p[3] <= 1.0 + 1e-12
    assert in_polytope(instance.constraint, q.p)


def test_concave_knapsack_lp(knapsack_gap):
    q = ex_ante_concave(knapsack_gap)
    assert q.method == "lp"
    assert q.p == pytest.approx((0.5, 0.5, 0.5), abs=1e-7)


def test_polytope_rejects_infeasible_vector():
    assert not in_polytope(KUniform(2, 1), (0.6, 0.6))
    assert not in_polytope(KUniform(2, 1), (-0.5, 0.0))


def test_restricted_vector():
    p = ExAnteVector((0.2, 0.3, 0.4), "given")
    assert p.restricted(frozenset({1})).p == (0.0, 0.3, 0.0)
    assert p.support() == frozenset({0, 1, 2})


def test_matroid_member(two_boxes):
    family = build_greedy_ocrs(two_boxes, ex_ante_membership(two_boxes))
    assert family.kind == "k_uniform"
    assert family.nominal_alpha == MATROID_ALPHA
    assert len(family.members) == 1
    member = family.members[0]
    assert member.activation == pytest.approx((0.125, 0.1875))
    assert member.threshold_pairs()[0] == pytest.approx((2.0, 0.5))
    assert member.threshold_pairs()[1] == pytest.approx((1.5, 0.375))


def test_knapsack_splits_big_and_small(knapsack_gap):
    family = build_greedy_ocrs(knapsack_gap, ex_ante_membership(knapsack_gap))
    assert family.nominal_alpha == pytest.approx(KNAPSACK_ALPHA)
    assert [m.label for m in family.members] == ["big", "small"]
    assert family.weights == (0.5, 0.5)
    assert family.members[0].whitelist == frozenset({0})
    assert family.members[1].whitelist == frozenset({1, 2})
    small_scale = 1.0 - 1.0 / math.sqrt(2.0)
    assert family.members[1].activation[1] == pytest.approx(0.25 * small_scale)


def test_unsupported_constraint():
    instance = build_instance(
        [[(2.0, 2.0, 0.5), (0.0, 0.0, 0.5)]] * 2, [0.25] * 2, BipartiteMatching([(0, 0), (0, 1)])
    )
    with pytest.raises(UnsupportedConstraint):
        build_greedy_ocrs(instance, ExAnteVector((0.5, 0.5), "given"))


def test_exhaustive_single_choice(two_boxes):
    family = build_greedy_ocrs(two_boxes, ex_ante_membership(two_boxes))
    report = estimate_selectability(family)
    assert report.estimates == pytest.approx((0.8125, 0.875))
    assert report.minimum() == pytest.approx(0.8125)
    assert report.minimum() >= MATROID_ALPHA
    assert not report.heuristic


def test_explicit_activation_override(two_boxes):
    family = build_greedy_ocrs(two_boxes, ex_ante_membership(two_boxes))
    report = estimate_selectability(family, p=(0.5, 0.5))
    assert report.estimates == pytest.approx((0.5, 0.5))


def test_sampled_mode_is_heuristic_and_close(two_boxes):
    family = build_greedy_ocrs(two_boxes, ex_ante_membership(two_boxes))
    report = estimate_selectability(family, mode="sampled", samples=10_000, seed=4)
    assert report.heuristic
    assert report.seed == 4
    assert report.estimates[0] == pytest.approx(0.8125, abs=0.03)
    rows = report.rows()
    assert rows[0]["mode"] == "sampled" and rows[0]["samples"] == 10_000


def test_partition_meets_nominal_alpha(data_dir):
    instance = load_instance(data_dir / "partition_small.json")
    family = build_greedy_ocrs(instance, ex_ante_membership(instance))
    report = estimate_selectability(family)
    assert report.minimum(sorted(family.whitelist)) >= MATROID_ALPHA


def test_sampled_needs_seed(two_boxes):
    family = build_greedy_ocrs(two_boxes, ex_ante_membership(two_boxes))
    with pytest.raises(BadParameters):
        estimate_selectability(family, mode="sampled")
    with pytest.raises(BadParameters):
        estimate_selectability(family, mode="psychic", seed=1)


def test_exhaustive_size_limit():
    instance = build_instance([[(2.0, 2.0, 0.5), (0.0, 0.0, 0.5)]] * 9, [0.25] * 9, KUniform(9, 1))
    family = build_greedy_ocrs(instance, ex_ante_membership(instance))
    with pytest.raises(TooLarge):
        estimate_selectability(family)


# =============================================================================
# Random instances
# =============================================================================

def _random_vector(constraint, rng: np.random.Generator) -> ExAnteVector:
    """A random point of the matroid polytope: scaled so no block or rank bound is exceeded."""
    raw = rng.random(constraint.n)
    if isinstance(constraint, KUniform):
        raw *= min(1.0, constraint.k / raw.sum())
    else:
        for block, cap in zip(constraint.blocks, constraint.caps):
            mass = raw[list(block)].sum()
            if mass > cap:
                raw[list(block)] *= cap / mass
    return ExAnteVector(tuple(float(v) for v in raw), "given")


@pytest.mark.parametrize(
    "params",
    [{"kind": "k_uniform", "k": 2}, {"kind": "partition", "blocks": 2}],
    ids=["k_uniform", "partition"],
)
def test_matroid_selectability_on_random_vectors(random_instances, params):
    rng = np.random.default_rng(11)
    for instance in random_instances(FamilyId.RANDOM_MATROID, 5, range(25), **params):
        p = _random_vector(instance.constraint, rng)
        family = build_greedy_ocrs(instance, p)
        report = estimate_selectability(family)
        # halved activation keeps every element at least 1/2 selectable
        assert report.minimum(sorted(family.whitelist)) >= 2 * MATROID_ALPHA - 1e-9, instance.name


def test_knapsack_selectability_on_random_instances(random_instances):
    for instance in random_instances(FamilyId.RANDOM_KNAPSACK, 5, range(25)):
        p = ex_ante_membership(instance)
        assert in_polytope(instance.constraint, p.p)
        family = build_greedy_ocrs(instance, p)
        report = estimate_selectability(family)
        assert report.minimum(sorted(family.whitelist)) >= KNAPSACK_ALPHA - 1e-9, instance.name
