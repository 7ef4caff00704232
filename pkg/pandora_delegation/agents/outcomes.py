"""Agent-side view of an element's outcomes under a mechanism.

For best-response computations only two things matter about a probed
outcome: whether it can be proposed, and its (x, y) if it can.  All
rejected outcomes of an element collapse into one piece and equal accepted
outcomes merge, which keeps the probe-state space small.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Tuple

from pandora_delegation.core.acceptance import refine_outcomes
from pandora_delegation.core.model import Instance
from pandora_delegation.mechanisms.mechanism import SingleProposalMechanism


@dataclass(frozen=True)
class AgentPiece:
    prob: float
    accepted: bool
    x: float
    y: float


def agent_pieces(instance: Instance, mech: SingleProposalMechanism, i: int) -> Tuple[AgentPiece, ...]:
    accepted: Dict[Tuple[float, float], float] = {}
    rejected = 0.0
    for piece in refine_outcomes(instance.dist(i), mech.rule_for(i)):
        if piece.prob <= 0:
            continue
        if piece.accepted:
            accepted[(piece.x, piece.y)] = accepted.get((piece.x, piece.y), 0.0) + piece.prob
        else:
            rejected += piece.prob
    pieces: List[AgentPiece] = [AgentPiece(p, True, x, y) for (x, y), p in sorted(accepted.items())]
    if rejected > 0:
        pieces.append(AgentPiece(rejected, False, 0.0, 0.0))
    return tuple(pieces)


def all_agent_pieces(instance: Instance, mech: SingleProposalMechanism) -> List[Tuple[AgentPiece, ...]]:
    return [agent_pieces(instance, mech, i) for i in range(instance.n)]


def masked_agent_law(pieces: Tuple[AgentPiece, ...]) -> Tuple[Tuple[float, float], ...]:
    """Law of w = y · 1(accepted)."""
    law: Dict[float, float] = {}
    for piece in pieces:
        w = piece.y if piece.accepted else 0.0
        law[w] = law.get(w, 0.0) + piece.prob
    return tuple(sorted(law.items()))
