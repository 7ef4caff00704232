"""Best response for single-choice sub-families in a fixed order.

When at most one element can be proposed, the agent's state is just the
outcome it currently holds.  Walking the elements in decreasing order of
their masked agent cap, the agent may stop (proposing the held outcome),
probe the next element, or skip it.  Reachable held outcomes are built
forward, then values are computed backward one position at a time, so the
work is linear in the number of elements times the number of held states.

This is exact for the order used; the index order is optimal for the
agent's Pandora problem, which makes it the engine of choice beyond the
full DP's guard.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from pandora_delegation.agents.outcomes import AgentPiece, all_agent_pieces, masked_agent_law
from pandora_delegation.agents.policies import TieBreaking, replaces
from pandora_delegation.constraints.oracles import capacity_one
from pandora_delegation.core.distributions import cap_value
from pandora_delegation.core.model import Instance
from pandora_delegation.errors import NotPandoraShaped
from pandora_delegation.mechanisms.mechanism import SingleProposalMechanism

logger = logging.getLogger(__name__)

Held = Optional[Tuple[float, float]]  # (y, x) of the outcome the agent would propose, None for nothing


@dataclass(frozen=True)
class SequentialResponse:
    agent_utility: float
    principal_utility: float
    order: Tuple[int, ...]
    held_states: int


def _keep(tie: TieBreaking, held: Held, piece: AgentPiece) -> Held:
    """The outcome the agent would propose after seeing ``piece``."""
    if not piece.accepted:
        return held
    current = (0.0, 0.0) if held is None else (held[0], held[1])
    if replaces(tie, (piece.y, piece.x), current):
        return (piece.y, piece.x)
    return held


def agent_index_order(instance: Instance, mech: SingleProposalMechanism,
                      pieces: Optional[List[Tuple[AgentPiece, ...]]] = None) -> Tuple[int, ...]:
    pieces = pieces or all_agent_pieces(instance, mech)
    shares = mech.shares(instance)
    caps = {
        i: cap_value(masked_agent_law(pieces[i]), shares.agent[i], allow_negative=True)
        for i in sorted(mech.whitelist)
    }
    return tuple(sorted(caps, key=lambda i: (-caps[i], i)))


def sequential_best_response(
    instance: Instance,
    mech: SingleProposalMechanism,
    tie_breaking: TieBreaking = TieBreaking.FAVOR_PRINCIPAL,
    order: Optional[Sequence[int]] = None,
) -> SequentialResponse:
    if not capacity_one(mech.sub_family):
        raise NotPandoraShaped("the sequential evaluator needs a sub-family admitting one element")
    pieces = all_agent_pieces(instance, mech)
    shares = mech.shares(instance)
    order = tuple(order) if order is not None else agent_index_order(instance, mech, pieces)

    # forward: held outcomes reachable before position j
    reachable: List[set] = [{None}]
    for i in order:
        nxt = set(reachable[-1])
        for held in reachable[-1]:
            for piece in pieces[i]:
                nxt.add(_keep(tie_breaking, held, piece))
        reachable.append(nxt)

    def stop_value(held: Held) -> Tuple[float, float]:
        return (0.0, 0.0) if held is None else held

    values: Dict[Held, Tuple[float, float]] = {h: stop_value(h) for h in reachable[-1]}
    for j in range(len(order) - 1, -1, -1):
        i = order[j]
        current: Dict[Held, Tuple[float, float]] = {}
        for held in reachable[j]:
            best = stop_value(held)
            skip = values[held]
            a_val = -shares.agent[i]
            p_val = -shares.principal[i]
            for piece in pieces[i]:
                sub_a, sub_p = values[_keep(tie_breaking, held, piece)]
                a_val += piece.prob * sub_a
                p_val += piece.prob * sub_p
            # stop, then probe, then skip
            if replaces(tie_breaking, (a_val, p_val), best):
                best = (a_val, p_val)
            if replaces(tie_breaking, skip, best):
                best = skip
            current[held] = best
        values = current

    agent, principal = values[None]
    return SequentialResponse(agent, principal, order, sum(len(r) for r in reachable))
