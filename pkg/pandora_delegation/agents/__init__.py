"""Agent best responses and the interaction simulator."""

from pandora_delegation.agents.best_response import (
    Action,
    AgentStrategy,
    BestResponse,
    best_response_dp,
    evaluate_strategy,
    play_strategy,
)
from pandora_delegation.agents.free_agents import favor_principal_free_agent, worst_case_free_agent
from pandora_delegation.agents.index_agent import AgentPlay, weitzman_index_agent
from pandora_delegation.agents.outcomes import AgentPiece, agent_pieces
from pandora_delegation.agents.policies import AgentKind, AgentPolicy, TieBreaking
from pandora_delegation.agents.sequential import SequentialResponse, sequential_best_response
from pandora_delegation.agents.simulator import InteractionResult, Trace, simulate_interaction

__all__ = [
    "Action",
    "AgentKind",
    "AgentPiece",
    "AgentPlay",
    "AgentPolicy",
    "AgentStrategy",
    "BestResponse",
    "InteractionResult",
    "SequentialResponse",
    "TieBreaking",
    "Trace",
    "agent_pieces",
    "best_response_dp",
    "evaluate_strategy",
    "favor_principal_free_agent",
    "play_strategy",
    "sequential_best_response",
    "simulate_interaction",
    "weitzman_index_agent",
    "worst_case_free_agent",
]
