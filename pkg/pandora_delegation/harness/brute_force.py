"""Brute-force search for the best deterministic single-proposal mechanism.

Only 1-uniform constraints are searched.  A candidate assigns every element
an option: a set of accepted atoms (empty means the element is excluded)
and, in the shared-cost model, the agent's cost share on a grid of c_i/16
steps.  Excluded elements always carry the full cost as their share.

Two search spaces:

* ``exhaustive``: every assignment.  With ``symmetry`` on, interchangeable
  elements (same cost and the same law under every share) receive option
  multisets instead of sequences.
* ``homogeneous``: the first k elements share one option, the rest are
  excluded, for k in {1..8}, a geometric grid and n.  Options accepting no
  positive principal value are skipped since they can only cost the
  principal.

``search="auto"`` is exhaustive within ``max_candidates`` and homogeneous
beyond.  Each candidate is scored by the agent's exact best response: the
memoized DP when its state count is small, otherwise the sequential
evaluator.

Families whose agent values depend on the announced shares pass an
``instance_factory`` mapping a cost division to the instance; element i's
law may only depend on its own share.
"""

from __future__ import annotations

import itertools
import logging
import math
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, FrozenSet, Iterator, List, Optional, Sequence, Tuple

from pandora_delegation.agents.best_response import best_response_dp, piece_state_count
from pandora_delegation.agents.outcomes import all_agent_pieces
from pandora_delegation.agents.policies import TieBreaking
from pandora_delegation.agents.sequential import sequential_best_response
from pandora_delegation.constraints.oracles import KUniform
from pandora_delegation.core.model import Instance, ModelKind
from pandora_delegation.core.numerics import strictly_greater
from pandora_delegation.errors import BadParameters, TooLarge, UnsupportedConstraint
from pandora_delegation.mechanisms.builders import outcome_pattern_mechanism
from pandora_delegation.mechanisms.mechanism import SingleProposalMechanism

logger = logging.getLogger(__name__)

DEFAULT_MAX_CANDIDATES = 10**6
DEFAULT_DP_STATES = 20_000
HOMOGENEOUS_SMALL_K = 8

InstanceFactory = Callable[[Sequence[float]], Instance]


@dataclass(frozen=True)
class Option:
    share: Optional[float]      # agent's cost share; None outside the shared-cost model
    atoms: FrozenSet[int]


@dataclass
class BruteForceResult:
    mechanism: SingleProposalMechanism
    instance: Instance          # the instance the winner was scored on
    delegated: float
    agent: float
    candidates: int
    search: str                 # "exhaustive" | "homogeneous"
    evaluator: str              # evaluator that scored the winner
    options: Tuple[Option, ...] = field(default_factory=tuple)

    @property
    def patterns(self) -> List[List[int]]:
        return [sorted(o.atoms) for o in self.options]


# ---------------------------------------------------------------------------
# Option lists
# ---------------------------------------------------------------------------

class _Laws:
    """Element laws per share, through the factory when there is one."""

    def __init__(self, instance: Instance, factory: Optional[InstanceFactory]) -> None:
        self.instance = instance
        self.factory = factory
        self._cache: Dict[Tuple[int, Optional[float]], tuple] = {}

    def atoms(self, i: int, share: Optional[float]) -> tuple:
        key = (i, share)
        if key not in self._cache:
            if self.factory is None or share is None:
                dist = self.instance.dist(i)
            else:
                division = list(self.instance.costs)
                division[i] = share
                dist = self.factory(division).dist(i)
            self._cache[key] = dist.atoms
        return self._cache[key]


def _share_grid(instance: Instance, i: int, cost_grid: int) -> List[Optional[float]]:
    if instance.model.kind is not ModelKind.SHARED_COST:
        return [None]
    cost = instance.elements[i].cost
    if cost == 0:
        return [0.0]
    return [cost * j / cost_grid for j in range(cost_grid + 1)]


def _excluded(instance: Instance, i: int) -> Option:
    full = instance.elements[i].cost if instance.model.kind is ModelKind.SHARED_COST else None
    return Option(full, frozenset())


def _element_options(instance: Instance, laws: _Laws, i: int, cost_grid: int) -> List[Option]:
    options = [_excluded(instance, i)]
    for share in _share_grid(instance, i, cost_grid):
        size = len(laws.atoms(i, share))
        for r in range(1, size + 1):
            for combo in itertools.combinations(range(size), r):
                options.append(Option(share, frozenset(combo)))
    return options


def _element_signature(instance: Instance, laws: _Laws, i: int, cost_grid: int) -> tuple:
    shares = _share_grid(instance, i, cost_grid)
    return (instance.elements[i].cost, tuple((s, laws.atoms(i, s)) for s in shares))


def symmetry_classes(instance: Instance, laws: _Laws, cost_grid: int) -> List[List[int]]:
    groups: Dict[tuple, List[int]] = {}
    for i in range(instance.n):
        groups.setdefault(_element_signature(instance, laws, i, cost_grid), []).append(i)
    return sorted(groups.values())


# ---------------------------------------------------------------------------
# Candidate generation
# ---------------------------------------------------------------------------

def _exhaustive_count(classes: List[List[int]], options: List[List[Option]], symmetry: bool) -> int:
    total = 1
    for members in classes:
        size = len(options[members[0]])
        m = len(members)
        total *= math.comb(m + size - 1, m) if symmetry else size**m
    return total


def _exhaustive(classes: List[List[int]], options: List[List[Option]], symmetry: bool,
                n: int) -> Iterator[Tuple[Option, ...]]:
    per_class = []
    for members in classes:
        size = len(options[members[0]])
        if symmetry:
            per_class.append(list(itertools.combinations_with_replacement(range(size), len(members))))
        else:
            per_class.append(list(itertools.product(range(size), repeat=len(members))))
    for choice in itertools.product(*per_class):
        assigned: List[Optional[Option]] = [None] * n
        for members, combo in zip(classes, choice):
            for i, idx in zip(members, combo):
                assigned[i] = options[i][idx]
        yield tuple(assigned)  # type: ignore[arg-type]


def homogeneous_k_values(n: int) -> List[int]:
    ks = set(range(1, min(n, HOMOGENEOUS_SMALL_K) + 1))
    k = float(HOMOGENEOUS_SMALL_K)
    while k < n:
        ks.add(int(math.ceil(k)))
        k *= 1.5
    ks.add(n)
    return sorted(v for v in ks if 1 <= v <= n)


def _homogeneous(instance: Instance, laws: _Laws, options: List[List[Option]]) -> Iterator[Tuple[Option, ...]]:
    n = instance.n
    for i in range(1, n):
        for option in options[0][1:]:
            if len(laws.atoms(i, option.share)) != len(laws.atoms(0, option.share)):
                raise TooLarge("homogeneous search needs elements with matching supports")
    excluded = [_excluded(instance, i) for i in range(n)]
    yield tuple(excluded)
    for option in options[0][1:]:
        atoms = laws.atoms(0, option.share)
        if not any(atoms[a].x > 0 for a in option.atoms):
            continue
        for k in homogeneous_k_values(n):
            yield tuple([option] * k + excluded[k:])


# ---------------------------------------------------------------------------
# Scoring
# ---------------------------------------------------------------------------

def _candidate(instance: Instance, factory: Optional[InstanceFactory],
               assignment: Sequence[Option]) -> Tuple[Instance, SingleProposalMechanism]:
    division = None
    if instance.model.kind is ModelKind.SHARED_COST:
        division = tuple(float(o.share) for o in assignment)
    target = factory(division) if factory is not None and division is not None else instance
    mech = outcome_pattern_mechanism(target, [o.atoms for o in assignment], division, label="brute_force")
    return target, mech


def score_candidate(
    instance: Instance,
    mech: SingleProposalMechanism,
    tie_breaking: TieBreaking,
    evaluator: str = "auto",
    dp_states: int = DEFAULT_DP_STATES,
) -> Tuple[float, float, str]:
    """(principal utility, agent utility, evaluator used) under the agent's best response."""
    if evaluator not in ("auto", "dp", "sequential"):
        raise BadParameters(f"evaluator must be auto, dp or sequential, got {evaluator!r}")
    use_dp = evaluator == "dp" or (
        evaluator == "auto" and piece_state_count(all_agent_pieces(instance, mech)) <= dp_states
    )
    if use_dp:
        response = best_response_dp(instance, mech, tie_breaking)
        return response.principal_utility, response.agent_utility, "dp"
    seq = sequential_best_response(instance, mech, tie_breaking)
    return seq.principal_utility, seq.agent_utility, "sequential"


def brute_force_optimal_mechanism(
    instance: Instance,
    symmetry: bool = True,
    tie_breaking: TieBreaking = TieBreaking.FAVOR_PRINCIPAL,
    cost_grid: int = 16,
    search: str = "auto",
    evaluator: str = "auto",
    instance_factory: Optional[InstanceFactory] = None,
    max_candidates: int = DEFAULT_MAX_CANDIDATES,
    dp_states: int = DEFAULT_DP_STATES,
) -> BruteForceResult:
    constraint = instance.constraint
    if not (isinstance(constraint, KUniform) and constraint.k == 1):
        raise UnsupportedConstraint("brute force searches 1-uniform constraints only")
    if search not in ("auto", "exhaustive", "homogeneous"):
        raise BadParameters(f"search must be auto, exhaustive or homogeneous, got {search!r}")
    if cost_grid < 1:
        raise BadParameters(f"cost_grid must be >= 1, got {cost_grid}")

    started = time.perf_counter()
    n = instance.n
    laws = _Laws(instance, instance_factory)
    options = [_element_options(instance, laws, i, cost_grid) for i in range(n)]
    classes = symmetry_classes(instance, laws, cost_grid) if symmetry else [[i] for i in range(n)]
    count = _exhaustive_count(classes, options, symmetry)

    mode = search
    if mode == "auto":
        mode = "exhaustive" if count <= max_candidates else "homogeneous"
    if mode == "exhaustive" and count > max_candidates:
        raise TooLarge(f"{count} candidate mechanisms exceed the limit of {max_candidates}")
    logger.info("brute_force: START instance=%s n=%d search=%s exhaustive_count=%d",
                instance.name, n, mode, count)

    candidates = (
        _exhaustive(classes, options, symmetry, n) if mode == "exhaustive" else _homogeneous(instance, laws, options)
    )
    best: Optional[BruteForceResult] = None
    seen = 0
    for assignment in candidates:
        seen += 1
        target, mech = _candidate(instance, instance_factory, assignment)
        principal, agent, used = score_candidate(target, mech, tie_breaking, evaluator, dp_states)
        logger.debug("brute_force: candidate=%d principal=%s evaluator=%s", seen, principal, used)
        if best is None or strictly_greater(principal, best.delegated):
            best = BruteForceResult(mech, target, principal, agent, 0, mode, used, tuple(assignment))

    assert best is not None
    best.candidates = seen
    logger.info("brute_force: DONE instance=%s candidates=%d best=%s wall_ms=%.1f",
                instance.name, seen, best.delegated, 1000 * (time.perf_counter() - started))
    return best
