"""Free agents: zero probing cost, so every whitelisted element that can be
accepted gets probed, and the proposal is some maximal acceptable set.

The adversarial agent picks the maximal set worst for the principal, the
favoring agent the best one.  Exact over maximal sets when at most
``MAX_EXACT_CANDIDATES`` outcomes are acceptable, otherwise a greedy
completion (ascending x for the adversary, descending for the favoring
agent) flagged as heuristic.
"""

from __future__ import annotations

import logging
from typing import FrozenSet, List, Tuple

from pandora_delegation.agents.index_agent import AgentPlay
from pandora_delegation.core.acceptance import acceptance_probability
from pandora_delegation.core.model import Instance, ModelKind
from pandora_delegation.core.profiles import RealizationProfile
from pandora_delegation.errors import ModelMismatch
from pandora_delegation.mechanisms.mechanism import SingleProposalMechanism

logger = logging.getLogger(__name__)

MAX_EXACT_CANDIDATES = 12


def _probed_and_candidates(instance: Instance, mech: SingleProposalMechanism,
                           profile: RealizationProfile) -> Tuple[Tuple[int, ...], List[int]]:
    if instance.model.kind not in (ModelKind.FREE_AGENT, ModelKind.SHARED_COST):
        raise ModelMismatch("maximal-proposal agents need a free-agent or zero-surplus shared-cost setting")
    probed = tuple(
        i for i in sorted(mech.whitelist)
        if mech.rule_for(i) is not None and acceptance_probability(instance.dist(i), mech.rule_for(i)) > 0
    )
    candidates = [
        i for i in probed
        if mech.rules[i].accepts(profile.xs[i], profile.atoms[i], profile.tags[i])
    ]
    return probed, candidates


def _maximal_sets(mech: SingleProposalMechanism, candidates: List[int]) -> List[FrozenSet[int]]:
    out = []
    for chosen in mech.sub_family.enumerate_feasible(within=candidates):
        if all(j in chosen or not mech.sub_family.is_feasible(chosen | {j}) for j in candidates):
            out.append(chosen)
    return out


def _maximal_play(instance: Instance, mech: SingleProposalMechanism,
                  profile: RealizationProfile, adversarial: bool) -> AgentPlay:
    probed, candidates = _probed_and_candidates(instance, mech, profile)
    sign = 1.0 if adversarial else -1.0
    if len(candidates) <= MAX_EXACT_CANDIDATES:
        best = min(
            _maximal_sets(mech, candidates),
            key=lambda s: (sign * sum(profile.xs[i] for i in s), tuple(sorted(s))),
        )
        return AgentPlay(probed, best)

    order = sorted(candidates, key=lambda i: (sign * profile.xs[i], i))
    chosen: FrozenSet[int] = frozenset()
    for i in order:
        if mech.sub_family.is_feasible(chosen | {i}):
            chosen = chosen | {i}
    logger.debug("maximal-proposal agent: greedy completion over %d candidates", len(candidates))
    return AgentPlay(probed, chosen, heuristic=True)


def worst_case_free_agent(instance: Instance, mech: SingleProposalMechanism,
                          profile: RealizationProfile) -> AgentPlay:
    return _maximal_play(instance, mech, profile, adversarial=True)


def favor_principal_free_agent(instance: Instance, mech: SingleProposalMechanism,
                               profile: RealizationProfile) -> AgentPlay:
    return _maximal_play(instance, mech, profile, adversarial=False)
