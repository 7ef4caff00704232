"""Weitzman-index agent.

The agent's own problem under a per-element threshold mechanism with a
matroid sub-family is a Pandora's box instance over w_i = y_i·1(accepted):
run the lazy index greedy with caps τ^w at the agent's cost shares over the
whitelist, and propose the selected set.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import FrozenSet, Tuple

from pandora_delegation.agents.outcomes import all_agent_pieces, masked_agent_law
from pandora_delegation.agents.policies import TieBreaking
from pandora_delegation.core.distributions import cap_value
from pandora_delegation.core.model import Instance
from pandora_delegation.core.profiles import RealizationProfile
from pandora_delegation.errors import NotPandoraShaped
from pandora_delegation.mechanisms.mechanism import SingleProposalMechanism
from pandora_delegation.solvers.weitzman import lazy_index_greedy


@dataclass(frozen=True)
class AgentPlay:
    probed: Tuple[int, ...]
    proposal: FrozenSet[int]
    heuristic: bool = False


def weitzman_index_agent(
    instance: Instance,
    mech: SingleProposalMechanism,
    profile: RealizationProfile,
    tie_breaking: TieBreaking = TieBreaking.FAVOR_PRINCIPAL,
) -> AgentPlay:
    if not mech.sub_family.is_matroid:
        raise NotPandoraShaped("the index agent needs a matroid sub-family")
    shares = mech.shares(instance)
    pieces = all_agent_pieces(instance, mech)
    n = instance.n
    caps = [
        cap_value(masked_agent_law(pieces[i]), shares.agent[i], allow_negative=True) if i in mech.whitelist else 0.0
        for i in range(n)
    ]
    accepted = [
        mech.rule_for(i) is not None and mech.rules[i].accepts(profile.xs[i], profile.atoms[i], profile.tags[i])
        for i in range(n)
    ]
    realized = [profile.ys[i] if accepted[i] else 0.0 for i in range(n)]
    probed, proposal = lazy_index_greedy(mech.sub_family, caps, realized, eligible=mech.whitelist)

    if tie_breaking is TieBreaking.FAVOR_PRINCIPAL:
        # agent-indifferent additions that help the principal
        extras = sorted(
            (i for i in probed if accepted[i] and i not in proposal and realized[i] == 0.0 and profile.xs[i] > 0),
            key=lambda i: (-profile.xs[i], i),
        )
        for i in extras:
            if mech.sub_family.is_feasible(proposal | {i}):
                proposal = proposal | {i}
    return AgentPlay(probed, proposal)
