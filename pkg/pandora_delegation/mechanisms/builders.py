"""Mechanism constructors, one per utility model.

| Builder                    | Model        | Guarantee evaluated against              |
|----------------------------|--------------|------------------------------------------|
| build_binary_matroid       | binary       | 1/4 · E[OPT], index-following agent       |
| build_free_agent_kuniform  | free_agent   | δ · E[OPT] at principal discount δ′ = δ   |
| build_free_agent_ocrs      | free_agent   | α · E[OPT] at principal discount 1 − α    |
| build_shared_cost          | shared_cost  | α/2 · E[OPT]                              |
| accept_all_mechanism       | any          | baseline: accept every feasible proposal  |
| outcome_pattern_mechanism  | any          | brute-force search candidate              |
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import FrozenSet, Optional, Sequence, Tuple

import numpy as np

from pandora_delegation.constraints.oracles import KUniform, restrict, unwrap
from pandora_delegation.core.acceptance import (
    OutcomeSetRule,
    ThresholdRule,
    acceptance_probability,
    clamp_nonpositive_threshold,
)
from pandora_delegation.core.model import CapValues, Instance, ModelKind, compute_caps
from pandora_delegation.core.numerics import approx_equal
from pandora_delegation.core.profiles import z_laws
from pandora_delegation.errors import BadParameters, InfeasibleDelta, ModelMismatch, UnsupportedConstraint
from pandora_delegation.mechanisms.mechanism import Provenance, SingleProposalMechanism
from pandora_delegation.ocrs.ex_ante import ExAnteVector, ex_ante_concave, ex_ante_membership
from pandora_delegation.ocrs.greedy import GreedyFamily, build_greedy_ocrs
from pandora_delegation.solvers.surrogate import opt_surrogate

logger = logging.getLogger(__name__)


def _require_model(instance: Instance, kind: ModelKind) -> None:
    if instance.model.kind is not kind:
        raise ModelMismatch(f"expected a {kind.value} instance, got {instance.model.kind.value}")


def _floats(values: Sequence[float]) -> list:
    return [float(v) for v in values]


# ---------------------------------------------------------------------------
# Baselines
# ---------------------------------------------------------------------------

def accept_all_mechanism(instance: Instance, cost_division: Optional[Sequence[float]] = None) -> SingleProposalMechanism:
    rules = tuple(OutcomeSetRule(frozenset(range(e.dist.support_size))) for e in instance.elements)
    return SingleProposalMechanism(
        whitelist=frozenset(range(instance.n)),
        rules=rules,
        sub_family=instance.constraint,
        provenance=Provenance("accept_all"),
        cost_division=None if cost_division is None else tuple(cost_division),
    )


def outcome_pattern_mechanism(
    instance: Instance,
    patterns: Sequence[FrozenSet[int]],
    cost_division: Optional[Sequence[float]] = None,
    label: str = "outcome_pattern",
) -> SingleProposalMechanism:
    """Accept, per element, exactly the listed atoms; elements with no atoms are excluded."""
    whitelist = frozenset(i for i, pat in enumerate(patterns) if pat)
    rules = tuple(OutcomeSetRule(frozenset(pat)) if pat else None for pat in patterns)
    return SingleProposalMechanism(
        whitelist=whitelist,
        rules=rules,
        sub_family=restrict(instance.constraint, whitelist),
        provenance=Provenance(label, {"patterns": [sorted(p) for p in patterns]}),
        cost_division=None if cost_division is None else tuple(float(c) for c in cost_division),
    )


# ---------------------------------------------------------------------------
# Binary model
# ---------------------------------------------------------------------------

def build_binary_matroid(
    instance: Instance,
    family: Optional[GreedyFamily] = None,
    caps: Optional[CapValues] = None,
    seed: Optional[int] = None,
) -> SingleProposalMechanism:
    """Whitelist E′ = {i : τ^x_i ≥ t_i}; accept outcomes with x ≥ t_i inside the family's sub-family.

    The family's tie fraction q is dropped: a binary outcome at or above its
    threshold is always accepted.
    """
    _require_model(instance, ModelKind.BINARY)
    caps = caps or compute_caps(instance)
    if family is None:
        family = build_greedy_ocrs(instance, ex_ante_membership(instance, caps=caps, seed=seed), caps)
    if len(family.members) != 1:
        raise UnsupportedConstraint("the binary construction needs a single-member (matroid) family")
    member = family.members[0]

    rules = []
    whitelist = set()
    for i, rule in enumerate(member.rules):
        if rule is None:
            rules.append(None)
            continue
        rule = clamp_nonpositive_threshold(ThresholdRule(rule.t, 1.0, rule.cap), instance.dist(i))
        rules.append(rule)
        if caps.tau_x[i] >= rule.t or approx_equal(caps.tau_x[i], rule.t):
            whitelist.add(i)
    return SingleProposalMechanism(
        whitelist=frozenset(whitelist),
        rules=tuple(rules),
        sub_family=restrict(member.sub_family, whitelist),
        provenance=Provenance("binary_matroid", {"ex_ante": _floats(family.ex_ante)}, seed),
    )


# ---------------------------------------------------------------------------
# Free agent
# ---------------------------------------------------------------------------

def _at_least_k(probabilities: Sequence[float], k: int) -> float:
    """Pr[at least k successes] for independent Bernoulli trials."""
    dist = np.array([1.0])
    for a in probabilities:
        dist = np.convolve(dist, [1.0 - a, a])
    return float(dist[k:].sum())


def build_free_agent_kuniform(
    instance: Instance,
    delta: float,
    k: Optional[int] = None,
    caps: Optional[CapValues] = None,
) -> SingleProposalMechanism:
    """Global threshold T with Pr[#{i : Z_i clears T} ≥ k] = δ, tag-split at T."""
    _require_model(instance, ModelKind.FREE_AGENT)
    base, allowed = unwrap(instance.constraint)
    if not isinstance(base, KUniform):
        raise UnsupportedConstraint("the global-threshold construction needs a k-uniform constraint")
    if not 0.0 <= delta <= 0.5:
        raise BadParameters(f"delta must lie in [0, 1/2], got {delta!r}")
    k = base.k if k is None else k
    caps = caps or compute_caps(instance)
    laws = z_laws(instance, caps, allowed)
    n = instance.n

    if delta == 0.0:
        threshold, q = math.inf, 0.0
    else:
        def level_mass(level: float, q: float) -> float:
            probs = [
                sum(p for v, p in law if v > level) + q * sum(p for v, p in law if v == level)
                for law in laws
            ]
            return _at_least_k(probs, k)

        levels = sorted({v for law in laws for v, _ in law}, reverse=True)
        for level in levels:
            if level_mass(level, 1.0) >= delta - 1e-15:
                lo, hi = 0.0, 1.0
                for _ in range(100):
                    mid = (lo + hi) / 2
                    if level_mass(level, mid) < delta:
                        lo = mid
                    else:
                        hi = mid
                threshold, q = level, hi
                break
        else:
            raise InfeasibleDelta(f"no threshold reaches delta={delta} with n={n}, k={k}")

    rules = []
    whitelist = set()
    for i in range(n):
        if i not in allowed or math.isinf(threshold):
            rules.append(None)
            continue
        rule = clamp_nonpositive_threshold(ThresholdRule(threshold, q, caps.tau_x[i]), instance.dist(i))
        if math.isinf(rule.t):
            rules.append(None)
            continue
        rules.append(rule)
        if caps.tau_x[i] >= threshold or approx_equal(caps.tau_x[i], threshold):
            whitelist.add(i)
    rules = [r if i in whitelist else None for i, r in enumerate(rules)]
    logger.debug("free-agent k-uniform: T=%s q=%s whitelist=%s", threshold, q, sorted(whitelist))
    return SingleProposalMechanism(
        whitelist=frozenset(whitelist),
        rules=tuple(rules),
        sub_family=restrict(KUniform(n, k), whitelist),
        provenance=Provenance(
            "free_agent_kuniform",
            {"delta": delta, "k": k, "threshold": None if math.isinf(threshold) else threshold, "q": q},
        ),
        evaluation_discount=delta,
    )


def build_free_agent_ocrs(
    instance: Instance,
    p: ExAnteVector,
    family: GreedyFamily,
    member: int = 0,
    seed: Optional[int] = None,
) -> SingleProposalMechanism:
    """Whitelist = support of p within the member; principal discount δ = 1 − α."""
    _require_model(instance, ModelKind.FREE_AGENT)
    if not 0 <= member < len(family.members):
        raise BadParameters(f"family has {len(family.members)} members, asked for {member}")
    chosen = family.members[member]
    whitelist = p.support() & chosen.whitelist
    rules = tuple(
        clamp_nonpositive_threshold(r, instance.dist(i)) if (r is not None and i in whitelist) else None
        for i, r in enumerate(chosen.rules)
    )
    return SingleProposalMechanism(
        whitelist=whitelist,
        rules=rules,
        sub_family=restrict(chosen.sub_family, whitelist),
        provenance=Provenance(
            "free_agent_ocrs",
            {"member": chosen.label, "alpha": family.nominal_alpha, "ex_ante": _floats(p.p)},
            seed,
        ),
        evaluation_discount=1.0 - family.nominal_alpha,
    )


# ---------------------------------------------------------------------------
# Shared cost
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SharedCostSplit:
    p: ExAnteVector
    family: GreedyFamily
    member: int
    d: Tuple[float, ...]          # E[Y_i · 1(accepted)] per element
    low: FrozenSet[int]           # d_i <= c_i
    high: FrozenSet[int]          # d_i > c_i
    surrogate_low: float
    surrogate_high: float
    surrogate_all: float

    @property
    def branch(self) -> str:
        return "low" if self.surrogate_low >= self.surrogate_high else "high"


def shared_cost_split(
    instance: Instance,
    caps: Optional[CapValues] = None,
    member: int = 0,
    seed: Optional[int] = None,
) -> SharedCostSplit:
    _require_model(instance, ModelKind.SHARED_COST)
    caps = caps or compute_caps(instance)
    p = ex_ante_concave(instance, caps)
    family = build_greedy_ocrs(instance, p, caps)
    if not 0 <= member < len(family.members):
        raise BadParameters(f"family has {len(family.members)} members, asked for {member}")
    chosen = family.members[member]

    d = []
    for i, e in enumerate(instance.elements):
        rule = chosen.rules[i] if i in chosen.whitelist else None
        if rule is None:
            d.append(0.0)
            continue
        d.append(sum(a.p * a.y * rule.acceptance_fraction(a.x, idx) for idx, a in enumerate(e.dist.atoms)))

    low = frozenset(i for i in chosen.whitelist if d[i] <= instance.elements[i].cost or approx_equal(d[i], instance.elements[i].cost))
    high = chosen.whitelist - low
    surrogate = lambda side: opt_surrogate(instance, seed=seed, caps=caps, restrict_to=side).mean  # noqa: E731
    return SharedCostSplit(
        p=p,
        family=family,
        member=member,
        d=tuple(d),
        low=low,
        high=high,
        surrogate_low=surrogate(low),
        surrogate_high=surrogate(high),
        surrogate_all=opt_surrogate(instance, seed=seed, caps=caps).mean,
    )


def build_shared_cost(
    instance: Instance,
    caps: Optional[CapValues] = None,
    member: int = 0,
    seed: Optional[int] = None,
) -> SingleProposalMechanism:
    """Split by d_i against c_i, keep the side with the larger surrogate.

    On the low side the agent pays exactly d_i, so probing any whitelisted
    element leaves the agent zero expected surplus; on the high side the
    agent pays the full cost.
    """
    caps = caps or compute_caps(instance)
    split = shared_cost_split(instance, caps, member, seed)
    side = split.low if split.branch == "low" else split.high
    rebuilt = build_greedy_ocrs(instance, split.p.restricted(side), caps)
    chosen = rebuilt.members[member]
    whitelist = frozenset(
        i for i in chosen.whitelist
        if caps.tau_x[i] >= chosen.rules[i].t or approx_equal(caps.tau_x[i], chosen.rules[i].t)
    )
    costs = instance.costs
    if split.branch == "low":
        division = tuple(split.d[i] if i in whitelist else costs[i] for i in range(instance.n))
    else:
        division = tuple(costs)
    rules = tuple(r if i in whitelist else None for i, r in enumerate(chosen.rules))
    logger.debug("shared cost: branch=%s whitelist=%s", split.branch, sorted(whitelist))
    return SingleProposalMechanism(
        whitelist=whitelist,
        rules=rules,
        sub_family=restrict(chosen.sub_family, whitelist),
        provenance=Provenance(
            "shared_cost",
            {
                "branch": split.branch,
                "d": _floats(split.d),
                "surrogate_low": split.surrogate_low,
                "surrogate_high": split.surrogate_high,
                "surrogate_all": split.surrogate_all,
                "ex_ante": _floats(split.p.p),
            },
            seed,
        ),
        cost_division=division,
    )


def acceptance_mass(instance: Instance, mech: SingleProposalMechanism, i: int) -> float:
    """Pr[element i's outcome passes its rule]."""
    return acceptance_probability(instance.dist(i), mech.rule_for(i))
