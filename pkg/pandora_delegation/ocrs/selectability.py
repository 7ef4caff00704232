"""Empirical selectability of a greedy OCRS family.

For element i the selectability of a member is the probability, over the
random active set R (each j ≠ i active independently with probability
x_j), that every I ⊆ R with I ∈ 𝓘_sub still admits i.  The family value is
the weight-averaged member value.  Elements with zero ex-ante mass are
reported as 1 (they are never active).

* ``exhaustive``: all active sets, all feasible subsets (n <= 8).
* ``sampled``: seeded draws of R, and a single greedy adversary that packs
  R \\ {i} largest-first; this can miss blocking sets, so the estimate is an
  upper bound and the report is flagged ``heuristic``.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from typing import FrozenSet, List, Optional, Sequence, Tuple

import numpy as np

from pandora_delegation.config.settings import get_settings
from pandora_delegation.constraints.oracles import ConstraintOracle, Knapsack, unwrap
from pandora_delegation.core.profiles import chunked_generators
from pandora_delegation.errors import BadParameters, TooLarge
from pandora_delegation.ocrs.greedy import FamilyMember, GreedyFamily

logger = logging.getLogger(__name__)

MAX_EXHAUSTIVE = 8


@dataclass(frozen=True)
class SelectabilityReport:
    estimates: Tuple[float, ...]
    mode: str
    samples: int = 0
    seed: Optional[int] = None
    heuristic: bool = False

    def minimum(self, over: Optional[Sequence[int]] = None) -> float:
        idx = range(len(self.estimates)) if over is None else over
        values = [self.estimates[i] for i in idx]
        return min(values) if values else 1.0

    def rows(self) -> List[dict]:
        return [
            {"element_id": i, "estimate": v, "mode": self.mode, "samples": self.samples, "seed": self.seed}
            for i, v in enumerate(self.estimates)
        ]


def _admits(sub: ConstraintOracle, active: FrozenSet[int], i: int) -> bool:
    for chosen in sub.enumerate_feasible(within=active):
        if not sub.is_feasible(chosen | {i}):
            return False
    return True


def _member_exhaustive(member: FamilyMember, activation: Sequence[float], i: int) -> float:
    if i not in member.whitelist:
        return 0.0
    others = [j for j in range(len(activation)) if j != i and activation[j] > 0]
    total = 0.0
    for pattern in itertools.product((False, True), repeat=len(others)):
        prob = math.prod(activation[j] if on else 1.0 - activation[j] for j, on in zip(others, pattern))
        if prob == 0.0:
            continue
        active = frozenset(j for j, on in zip(others, pattern) if on)
        if _admits(member.sub_family, active, i):
            total += prob
    return total


def _adversary_order(sub: ConstraintOracle, active: Sequence[int]) -> List[int]:
    base, _ = unwrap(sub)
    if isinstance(base, Knapsack):
        return sorted(active, key=lambda j: (-base.sizes[j], j))
    return sorted(active)


def _greedy_blocks(sub: ConstraintOracle, active: Sequence[int], i: int) -> bool:
    chosen: FrozenSet[int] = frozenset()
    for j in _adversary_order(sub, active):
        if sub.is_feasible(chosen | {j}):
            chosen = chosen | {j}
    return not sub.is_feasible(chosen | {i})


def estimate_selectability(
    family: GreedyFamily,
    p: Optional[Sequence[float]] = None,
    mode: str = "exhaustive",
    samples: Optional[int] = None,
    seed: Optional[int] = None,
) -> SelectabilityReport:
    """Per-element selectability; ``p`` overrides every member's activation vector."""
    n = len(family.ex_ante)
    involved = family.whitelist

    if mode == "exhaustive":
        if n > MAX_EXHAUSTIVE:
            raise TooLarge(f"exhaustive selectability is limited to n <= {MAX_EXHAUSTIVE}")
        estimates = []
        for i in range(n):
            if i not in involved:
                estimates.append(1.0)
                continue
            estimates.append(sum(
                w * _member_exhaustive(m, m.activation if p is None else p, i)
                for m, w in zip(family.members, family.weights)
            ))
        return SelectabilityReport(tuple(estimates), mode)

    if mode != "sampled":
        raise BadParameters(f"mode must be 'exhaustive' or 'sampled', got {mode!r}")
    if seed is None:
        raise BadParameters("sampled selectability requires a seed")
    samples = samples or get_settings().mc_samples
    hits = np.zeros((len(family.members), n))
    for rng, size in chunked_generators(seed, samples):
        draws = rng.random((size, len(family.members), n))
        for row in draws:
            for m_idx, member in enumerate(family.members):
                activation = np.asarray(member.activation if p is None else p, dtype=float)
                active = np.flatnonzero(row[m_idx] < activation).tolist()
                for i in member.whitelist:
                    others = [j for j in active if j != i]
                    if not _greedy_blocks(member.sub_family, others, i):
                        hits[m_idx, i] += 1
    estimates = []
    for i in range(n):
        if i not in involved:
            estimates.append(1.0)
        else:
            estimates.append(float(sum(w * hits[m, i] / samples for m, w in enumerate(family.weights))))
    return SelectabilityReport(tuple(estimates), mode, samples, seed, heuristic=True)
