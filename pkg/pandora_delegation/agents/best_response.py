"""Exact agent best response by memoized search over probe states.

State: per element, −1 (unprobed) or the index of its realized agent piece
(see ``agents.outcomes``).  At every state the agent either stops and
proposes the best acceptable subset of its probed, accepted outcomes, or
pays its cost share and probes one more element.  Costs already paid are
sunk and never enter a decision.  Among agent-optimal actions the tie rule
picks the principal-best (or worst) one; ``LOWEST_ID`` prefers stopping,
then the lowest element id, and for proposals the smallest sorted id tuple.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Optional, Tuple

from pandora_delegation.agents.outcomes import AgentPiece, all_agent_pieces
from pandora_delegation.agents.policies import TieBreaking, replaces
from pandora_delegation.config.settings import get_settings
from pandora_delegation.core.model import Instance
from pandora_delegation.errors import TooLarge
from pandora_delegation.mechanisms.mechanism import SingleProposalMechanism

logger = logging.getLogger(__name__)

State = Tuple[int, ...]


@dataclass(frozen=True)
class Action:
    kind: str                                  # "stop" | "probe"
    element: Optional[int] = None              # probe target
    proposal: FrozenSet[int] = frozenset()     # stop: proposed elements


@dataclass
class AgentStrategy:
    decisions: Dict[State, Action]
    pieces: List[Tuple[AgentPiece, ...]]


@dataclass(frozen=True)
class BestResponse:
    strategy: AgentStrategy
    agent_utility: float
    principal_utility: float
    states: int


def piece_state_count(pieces: List[Tuple[AgentPiece, ...]]) -> int:
    return math.prod(len(p) + 1 for p in pieces)


def _best_proposal(
    mech: SingleProposalMechanism,
    pieces: List[Tuple[AgentPiece, ...]],
    state: State,
    tie: TieBreaking,
) -> Tuple[FrozenSet[int], float, float]:
    candidates = [
        i for i, s in enumerate(state)
        if s >= 0 and pieces[i][s].accepted and i in mech.whitelist
    ]
    best: Tuple[FrozenSet[int], float, float] = (frozenset(), 0.0, 0.0)
    best_key: Tuple[int, ...] = ()
    for chosen in mech.sub_family.enumerate_feasible(within=candidates):
        if not chosen:
            continue
        agent = sum(pieces[i][state[i]].y for i in chosen)
        principal = sum(pieces[i][state[i]].x for i in chosen)
        key = tuple(sorted(chosen))
        if replaces(tie, (agent, principal), (best[1], best[2])):
            best, best_key = (chosen, agent, principal), key
        elif tie is TieBreaking.LOWEST_ID and not replaces(tie, (best[1], best[2]), (agent, principal)):
            if key < best_key:
                best, best_key = (chosen, agent, principal), key
    return best


def best_response_dp(
    instance: Instance,
    mech: SingleProposalMechanism,
    tie_breaking: TieBreaking = TieBreaking.FAVOR_PRINCIPAL,
    guard: Optional[int] = None,
) -> BestResponse:
    guard = get_settings().enum_guard if guard is None else guard
    pieces = all_agent_pieces(instance, mech)
    states = piece_state_count(pieces)
    if states > guard:
        raise TooLarge(f"agent DP needs {states} states (guard {guard})")

    shares = mech.shares(instance)
    n = instance.n
    decisions: Dict[State, Action] = {}
    memo: Dict[State, Tuple[float, float]] = {}

    def value(state: State) -> Tuple[float, float]:
        cached = memo.get(state)
        if cached is not None:
            return cached
        proposal, agent, principal = _best_proposal(mech, pieces, state, tie_breaking)
        best = (agent, principal)
        action = Action("stop", proposal=proposal)
        for i in range(n):
            if state[i] >= 0:
                continue
            a_val = -shares.agent[i]
            p_val = -shares.principal[i]
            for idx, piece in enumerate(pieces[i]):
                sub_a, sub_p = value(state[:i] + (idx,) + state[i + 1:])
                a_val += piece.prob * sub_a
                p_val += piece.prob * sub_p
            if replaces(tie_breaking, (a_val, p_val), best):
                best = (a_val, p_val)
                action = Action("probe", element=i)
        memo[state] = best
        decisions[state] = action
        return best

    agent, principal = value(tuple(-1 for _ in range(n)))
    logger.debug("best_response_dp: %d states", len(memo))
    return BestResponse(AgentStrategy(decisions, pieces), agent, principal, len(memo))


# ---------------------------------------------------------------------------
# Strategy evaluation
# ---------------------------------------------------------------------------

def play_strategy(strategy: AgentStrategy, piece_profile: State) -> Tuple[Tuple[int, ...], FrozenSet[int]]:
    """Follow the decision map on a full piece profile: (probe order, proposal)."""
    state = [-1] * len(piece_profile)
    probed = []
    while True:
        action = strategy.decisions[tuple(state)]
        if action.kind == "stop":
            return tuple(probed), action.proposal
        i = action.element
        state[i] = piece_profile[i]
        probed.append(i)


def evaluate_strategy(
    instance: Instance,
    mech: SingleProposalMechanism,
    strategy: AgentStrategy,
) -> Tuple[float, float]:
    """Expected (agent, principal) utilities when the agent follows ``strategy``."""
    shares = mech.shares(instance)
    pieces = strategy.pieces
    agent_total = 0.0
    principal_total = 0.0
    for combo in itertools.product(*(range(len(p)) for p in pieces)):
        prob = math.prod(pieces[i][c].prob for i, c in enumerate(combo))
        if prob == 0.0:
            continue
        probed, proposal = play_strategy(strategy, combo)
        agent = sum(pieces[i][combo[i]].y for i in proposal) - sum(shares.agent[i] for i in probed)
        principal = sum(pieces[i][combo[i]].x for i in proposal) - sum(shares.principal[i] for i in probed)
        agent_total += prob * agent
        principal_total += prob * principal
    return agent_total, principal_total
