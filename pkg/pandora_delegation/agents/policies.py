"""Agent policy selection and tie-breaking."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Tuple

from pandora_delegation.core.numerics import approx_equal


class AgentKind(str, Enum):
    EXACT_DP = "dp"                       # exact best response, memoized over probe states
    SEQUENTIAL = "sequential"             # exact best response for 1-uniform sub-families
    WEITZMAN_INDEX = "index"              # Weitzman policy on the agent's masked values
    ADVERSARIAL_MAXIMAL = "adversarial"   # free agent, worst maximal proposal for the principal
    FAVOR_PRINCIPAL_MAXIMAL = "favor"     # free agent, best maximal proposal for the principal
    PRESCRIBED_THRESHOLD = "threshold"    # follows the mechanism's threshold strategy


class TieBreaking(str, Enum):
    FAVOR_PRINCIPAL = "favor_principal"
    AGAINST_PRINCIPAL = "against_principal"
    LOWEST_ID = "lowest_id"


@dataclass(frozen=True)
class AgentPolicy:
    kind: AgentKind = AgentKind.EXACT_DP
    tie_breaking: TieBreaking = TieBreaking.FAVOR_PRINCIPAL


def replaces(
    tie: TieBreaking,
    candidate: Tuple[float, float],
    incumbent: Tuple[float, float],
) -> bool:
    """Whether a candidate (agent, principal) value pair beats the incumbent.

    The agent maximizes its own value; among agent-indifferent options the
    tie rule decides on the principal's value.  ``LOWEST_ID`` keeps the
    incumbent, so callers must enumerate options in their preferred order.
    """
    agent_c, principal_c = candidate
    agent_i, principal_i = incumbent
    if not approx_equal(agent_c, agent_i):
        return agent_c > agent_i
    if approx_equal(principal_c, principal_i):
        return False
    if tie is TieBreaking.FAVOR_PRINCIPAL:
        return principal_c > principal_i
    if tie is TieBreaking.AGAINST_PRINCIPAL:
        return principal_c < principal_i
    return False
