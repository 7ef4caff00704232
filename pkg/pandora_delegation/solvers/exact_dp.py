"""Exact optimal adaptive policy for non-delegated Pandora's box.

Memoized recursion over the probe state: for each element either −1
(unprobed) or the index of its realized atom.  Selection is deferred to the
end, so the value of stopping is the best feasible set over probed values.

    V(s) = max( stop(s), max_{i unprobed} −c_i + Σ_a p_{i,a} V(s[i := a]) )
"""

from __future__ import annotations

import logging
from typing import Dict, Optional, Sequence, Tuple

from pandora_delegation.config.settings import get_settings
from pandora_delegation.core.model import Instance
from pandora_delegation.errors import TooLarge

logger = logging.getLogger(__name__)


def dp_state_count(instance: Instance) -> int:
    total = 1
    for e in instance.elements:
        total *= e.dist.support_size + 1
    return total


def exact_optimal_dp(
    instance: Instance,
    costs: Optional[Sequence[float]] = None,
    guard: Optional[int] = None,
) -> float:
    guard = get_settings().enum_guard if guard is None else guard
    states = dp_state_count(instance)
    if states > guard:
        raise TooLarge(f"optimal-policy DP needs {states} states (guard {guard})")

    costs = instance.costs if costs is None else tuple(costs)
    oracle = instance.constraint
    n = instance.n
    atoms = [e.dist.atoms for e in instance.elements]
    memo: Dict[Tuple[int, ...], float] = {}

    def stop_value(state: Tuple[int, ...]) -> float:
        weights = [atoms[i][a].x if a >= 0 else 0.0 for i, a in enumerate(state)]
        return oracle.max_weight_feasible(weights)[1]

    def value(state: Tuple[int, ...]) -> float:
        cached = memo.get(state)
        if cached is not None:
            return cached
        best = stop_value(state)
        for i in range(n):
            if state[i] >= 0:
                continue
            cont = -costs[i]
            for a, atom in enumerate(atoms[i]):
                nxt = state[:i] + (a,) + state[i + 1:]
                cont += atom.p * value(nxt)
            if cont > best:
                best = cont
        memo[state] = best
        return best

    result = value(tuple(-1 for _ in range(n)))
    logger.debug("exact_optimal_dp: %d states visited", len(memo))
    return result
