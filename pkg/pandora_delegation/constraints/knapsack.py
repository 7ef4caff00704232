"""Exact max-weight knapsack.

Two routines, chosen automatically:

* an integer DP over capacity when every size and the budget are rationals
  with a common denominator <= 10^6 and the scaled budget is <= 10^5;
* otherwise depth-first branch and bound, include-first in id order, with
  the fractional (LP) relaxation as the upper bound.

Both return the lexicographically smallest sorted id tuple among optimal
sets (only positive weights are ever taken, so no optimum is a proper
superset of another).
"""

from __future__ import annotations

import logging
import math
from fractions import Fraction
from typing import FrozenSet, List, Optional, Sequence, Tuple

from pandora_delegation.errors import UnsupportedExact

logger = logging.getLogger(__name__)

MAX_DENOMINATOR = 10**6
MAX_SCALED_BUDGET = 10**5
MAX_BRANCH_ITEMS = 60
_REL = 1e-12


def _better(value: float, key: Tuple[int, ...], best_value: float, best_key: Tuple[int, ...]) -> bool:
    gap = value - best_value
    scale = max(1.0, abs(value), abs(best_value))
    if gap > _REL * scale:
        return True
    return abs(gap) <= _REL * scale and key < best_key


def _integer_scale(sizes: Sequence[float], budget: float) -> Optional[Tuple[List[int], int]]:
    fracs = []
    for v in list(sizes) + [budget]:
        f = Fraction(v).limit_denominator(MAX_DENOMINATOR)
        if abs(float(f) - v) > 1e-12 * max(1.0, abs(v)):
            return None
        fracs.append(f)
    denom = 1
    for f in fracs:
        denom = denom * f.denominator // math.gcd(denom, f.denominator)
        if denom > MAX_DENOMINATOR:
            return None
    scaled = [int(f * denom) for f in fracs]
    if scaled[-1] > MAX_SCALED_BUDGET:
        return None
    return scaled[:-1], scaled[-1]


def _dp(items: List[int], sizes: List[int], cap: int, weights: Sequence[float]) -> Tuple[FrozenSet[int], float]:
    # best[c] = (value, sorted ids) using capacity at most c
    best: List[Tuple[float, Tuple[int, ...]]] = [(0.0, ())] * (cap + 1)
    for i in items:
        s = sizes[i]
        if s > cap:
            continue
        for c in range(cap, s - 1, -1):
            prev_value, prev_key = best[c - s]
            value = prev_value + weights[i]
            key = tuple(sorted(prev_key + (i,)))
            if _better(value, key, best[c][0], best[c][1]):
                best[c] = (value, key)
    value, key = best[cap]
    return frozenset(key), value


def _branch_and_bound(items: List[int], sizes: Sequence[float], budget: float,
                      weights: Sequence[float]) -> Tuple[FrozenSet[int], float]:
    by_density = sorted(items, key=lambda i: (-(weights[i] / sizes[i]) if sizes[i] > 0 else -math.inf, i))
    state = {"value": 0.0, "key": ()}

    def bound(pos: int, room: float) -> float:
        rest = set(items[pos:])
        total = 0.0
        for i in by_density:
            if i not in rest:
                continue
            if sizes[i] <= room:
                room -= sizes[i]
                total += weights[i]
            else:
                total += weights[i] * room / sizes[i]
                break
        return total

    def visit(pos: int, room: float, value: float, chosen: Tuple[int, ...]) -> None:
        if _better(value, chosen, state["value"], state["key"]):
            state["value"], state["key"] = value, chosen
        if pos == len(items):
            return
        if value + bound(pos, room) < state["value"] - _REL * max(1.0, state["value"]):
            return
        i = items[pos]
        if sizes[i] <= room + _REL * max(1.0, budget):
            visit(pos + 1, room - sizes[i], value + weights[i], chosen + (i,))
        visit(pos + 1, room, value, chosen)

    visit(0, budget, 0.0, ())
    return frozenset(state["key"]), state["value"]


def knapsack_max_weight(sizes: Sequence[float], budget: float,
                        weights: Sequence[float]) -> Tuple[FrozenSet[int], float]:
    items = [i for i in range(len(sizes)) if weights[i] > 0 and sizes[i] <= budget * (1 + _REL)]
    if not items:
        return frozenset(), 0.0
    scaled = _integer_scale(sizes, budget)
    if scaled is not None:
        int_sizes, cap = scaled
        return _dp(items, int_sizes, cap, weights)
    if len(items) > MAX_BRANCH_ITEMS:
        raise UnsupportedExact(f"knapsack with {len(items)} irrational-size items has no exact routine here")
    logger.debug("knapsack: branch and bound over %d items", len(items))
    return _branch_and_bound(items, sizes, budget, weights)
