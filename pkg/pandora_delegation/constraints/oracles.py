"""Downward-closed set systems over the ground set {0, …, n−1}.

| Kind             | is_matroid | max_weight_feasible                     |
|------------------|------------|-----------------------------------------|
| k_uniform        | yes        | greedy                                  |
| partition        | yes        | greedy                                  |
| matroid_oracle   | yes        | greedy over the independence predicate  |
| graphic          | yes        | greedy, forest test via networkx        |
| knapsack         | no         | integer DP / branch and bound           |
| matching         | no         | networkx max_weight_matching, id order  |
| restricted       | inherits   | base routine on masked weights          |

Only elements with strictly positive weight are ever selected.  Greedy ties
go to the lowest element id; exact routines prefer the lexicographically
smallest sorted id tuple among optimal sets.
"""

from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from enum import Enum
from typing import Callable, Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple

import networkx as nx

from pandora_delegation.errors import BadParameters, NotMatroid, TooLarge

logger = logging.getLogger(__name__)

DEFAULT_ENUMERATION_GUARD = 20
_BUDGET_SLACK = 1e-12


class ConstraintKind(str, Enum):
    K_UNIFORM = "k_uniform"
    PARTITION = "partition"
    MATROID_ORACLE = "matroid_oracle"
    GRAPHIC = "graphic"
    KNAPSACK = "knapsack"
    MATCHING = "matching"
    RESTRICTED = "restricted"


Selection = Tuple[FrozenSet[int], float]


class ConstraintOracle(ABC):
    kind: ConstraintKind
    is_matroid: bool = False

    def __init__(self, n: int) -> None:
        if n < 0:
            raise BadParameters(f"ground set size must be >= 0, got {n}")
        self.n = n

    # -----------------------------------------------------------------------
    # Interface
    # -----------------------------------------------------------------------

    @abstractmethod
    def _feasible(self, subset: FrozenSet[int]) -> bool:
        """Membership test for a subset already known to lie in the ground set."""

    def is_feasible(self, subset: Iterable[int]) -> bool:
        s = frozenset(subset)
        if any(i < 0 or i >= self.n for i in s):
            return False
        return self._feasible(s)

    def max_weight_feasible(self, weights: Sequence[float]) -> Selection:
        self._check_weights(weights)
        if self.is_matroid:
            return self._greedy(weights)
        return self._max_weight_by_enumeration(weights)

    def enumerate_feasible(
        self, guard: int = DEFAULT_ENUMERATION_GUARD, within: Optional[Iterable[int]] = None
    ) -> Iterator[FrozenSet[int]]:
        """Every feasible subset of ``within`` (default: the ground set), each once."""
        pool = sorted(set(range(self.n)) if within is None else set(within))
        if len(pool) > guard:
            raise TooLarge(f"enumerating feasible sets over {len(pool)} > {guard} elements")
        yield from self._dfs(pool, 0, frozenset())

    def describe(self) -> Dict:
        return {"kind": self.kind.value, "n": self.n}

    # -----------------------------------------------------------------------
    # Shared routines
    # -----------------------------------------------------------------------

    def _check_weights(self, weights: Sequence[float]) -> None:
        if len(weights) != self.n:
            raise BadParameters(f"expected {self.n} weights, got {len(weights)}")

    def _dfs(self, pool: List[int], start: int, current: FrozenSet[int]) -> Iterator[FrozenSet[int]]:
        yield current
        for j in range(start, len(pool)):
            candidate = current | {pool[j]}
            # downward closure: an infeasible set has no feasible superset
            if self._feasible(candidate):
                yield from self._dfs(pool, j + 1, candidate)

    def _greedy(self, weights: Sequence[float]) -> Selection:
        order = sorted((i for i in range(self.n) if weights[i] > 0), key=lambda i: (-weights[i], i))
        chosen: FrozenSet[int] = frozenset()
        total = 0.0
        for i in order:
            if self._feasible(chosen | {i}):
                chosen = chosen | {i}
                total += weights[i]
        return chosen, total

    def _max_weight_by_enumeration(self, weights: Sequence[float]) -> Selection:
        positive = [i for i in range(self.n) if weights[i] > 0]
        best: Selection = (frozenset(), 0.0)
        best_key: Tuple[int, ...] = ()
        for s in self.enumerate_feasible(within=positive):
            value = sum(weights[i] for i in s)
            key = tuple(sorted(s))
            if value > best[1] or (value == best[1] and key < best_key):
                best, best_key = (s, value), key
        return best


# ---------------------------------------------------------------------------
# Matroids
# ---------------------------------------------------------------------------

class KUniform(ConstraintOracle):
    kind = ConstraintKind.K_UNIFORM
    is_matroid = True

    def __init__(self, n: int, k: int) -> None:
        super().__init__(n)
        if k < 0:
            raise BadParameters(f"k must be >= 0, got {k}")
        self.k = k

    def _feasible(self, subset: FrozenSet[int]) -> bool:
        return len(subset) <= self.k

    def describe(self) -> Dict:
        return {"kind": self.kind.value, "n": self.n, "k": self.k}


class PartitionMatroid(ConstraintOracle):
    kind = ConstraintKind.PARTITION
    is_matroid = True

    def __init__(self, n: int, blocks: Sequence[Sequence[int]], caps: Sequence[int]) -> None:
        super().__init__(n)
        if len(blocks) != len(caps):
            raise BadParameters("partition needs one capacity per block")
        self.blocks = tuple(tuple(sorted(b)) for b in blocks)
        self.caps = tuple(int(c) for c in caps)
        self.block_of: Dict[int, int] = {}
        for b, members in enumerate(self.blocks):
            for i in members:
                if i in self.block_of or not 0 <= i < n:
                    raise BadParameters(f"element {i} is repeated or outside the ground set")
                self.block_of[i] = b
        if len(self.block_of) != n:
            raise BadParameters("partition blocks must cover every element exactly once")
        if any(c < 0 for c in self.caps):
            raise BadParameters("block capacities must be >= 0")

    def _feasible(self, subset: FrozenSet[int]) -> bool:
        counts = [0] * len(self.blocks)
        for i in subset:
            b = self.block_of[i]
            counts[b] += 1
            if counts[b] > self.caps[b]:
                return False
        return True

    def describe(self) -> Dict:
        return {
            "kind": self.kind.value,
            "n": self.n,
            "blocks": [list(b) for b in self.blocks],
            "caps": list(self.caps),
        }


class MatroidByOracle(ConstraintOracle):
    """A matroid given by an independence predicate.  The caller vouches for the axioms."""

    kind = ConstraintKind.MATROID_ORACLE
    is_matroid = True

    def __init__(self, n: int, predicate: Callable[[FrozenSet[int]], bool], name: str = "custom",
                 descriptor: Optional[Dict] = None) -> None:
        super().__init__(n)
        self.predicate = predicate
        self.name = name
        self._descriptor = descriptor

    def _feasible(self, subset: FrozenSet[int]) -> bool:
        return not subset or bool(self.predicate(subset))

    def describe(self) -> Dict:
        if self._descriptor is not None:
            return dict(self._descriptor)
        return {"kind": self.kind.value, "n": self.n, "name": self.name}


def graphic_matroid(edges: Sequence[Tuple[int, int]]) -> MatroidByOracle:
    """Cycle matroid of a multigraph: element i is edge ``edges[i]``."""
    edge_list = [(int(u), int(v)) for u, v in edges]

    def is_forest(subset: FrozenSet[int]) -> bool:
        graph = nx.MultiGraph()
        graph.add_edges_from(edge_list[i] for i in subset)
        return nx.is_forest(graph)

    return MatroidByOracle(
        len(edge_list),
        is_forest,
        name="graphic",
        descriptor={"kind": ConstraintKind.GRAPHIC.value, "n": len(edge_list), "edges": [list(e) for e in edge_list]},
    )


# ---------------------------------------------------------------------------
# Non-matroids
# ---------------------------------------------------------------------------

class Knapsack(ConstraintOracle):
    kind = ConstraintKind.KNAPSACK

    def __init__(self, sizes: Sequence[float], budget: float) -> None:
        super().__init__(len(sizes))
        if budget <= 0 or any(s < 0 for s in sizes):
            raise BadParameters("knapsack needs a positive budget and non-negative sizes")
        self.sizes = tuple(float(s) for s in sizes)
        self.budget = float(budget)

    def _feasible(self, subset: FrozenSet[int]) -> bool:
        used = sum(self.sizes[i] for i in subset)
        return used <= self.budget * (1 + _BUDGET_SLACK) + _BUDGET_SLACK

    def is_big(self, i: int) -> bool:
        return self.sizes[i] > self.budget / 2

    def max_weight_feasible(self, weights: Sequence[float]) -> Selection:
        from pandora_delegation.constraints.knapsack import knapsack_max_weight

        self._check_weights(weights)
        return knapsack_max_weight(self.sizes, self.budget, weights)

    def describe(self) -> Dict:
        return {"kind": self.kind.value, "n": self.n, "sizes": list(self.sizes), "budget": self.budget}


class BipartiteMatching(ConstraintOracle):
    """Element i is the edge ``edges[i] = (left, right)``; feasible sets are matchings."""

    kind = ConstraintKind.MATCHING

    def __init__(self, edges: Sequence[Tuple[int, int]]) -> None:
        super().__init__(len(edges))
        self.edges = tuple((int(u), int(v)) for u, v in edges)

    def _feasible(self, subset: FrozenSet[int]) -> bool:
        left = [self.edges[i][0] for i in subset]
        right = [self.edges[i][1] for i in subset]
        return len(set(left)) == len(left) and len(set(right)) == len(right)

    def _matching_value(self, candidates: Iterable[int], weights: Sequence[float], used: FrozenSet) -> float:
        best_edge: Dict[Tuple, int] = {}
        for i in candidates:
            u, v = self.edges[i]
            key = (("L", u), ("R", v))
            if key[0] in used or key[1] in used:
                continue
            if key not in best_edge or weights[i] > weights[best_edge[key]]:
                best_edge[key] = i
        if not best_edge:
            return 0.0
        graph = nx.Graph()
        for (a, b), i in best_edge.items():
            graph.add_edge(a, b, weight=weights[i])
        mate = nx.max_weight_matching(graph, maxcardinality=False)
        return sum(weights[best_edge[(a, b) if a[0] == "L" else (b, a)]] for a, b in mate)

    def max_weight_feasible(self, weights: Sequence[float]) -> Selection:
        """Optimal matching with the smallest sorted id tuple among the optimal ones.

        Edges are fixed in id order: edge i is kept when the best completion
        using only larger ids still reaches the optimum.
        """
        self._check_weights(weights)
        positive = [i for i in range(self.n) if weights[i] > 0]
        target = self._matching_value(positive, weights, frozenset())
        tol = 1e-12 * max(1.0, abs(target))

        chosen: List[int] = []
        total = 0.0
        used: FrozenSet = frozenset()
        for pos, i in enumerate(positive):
            if total >= target - tol:
                break
            u, v = self.edges[i]
            if ("L", u) in used or ("R", v) in used:
                continue
            with_i = used | {("L", u), ("R", v)}
            rest = self._matching_value(positive[pos + 1:], weights, with_i)
            if total + weights[i] + rest >= target - tol:
                chosen.append(i)
                total += weights[i]
                used = with_i
        return frozenset(chosen), total

    def describe(self) -> Dict:
        return {"kind": self.kind.value, "n": self.n, "edges": [list(e) for e in self.edges]}


# ---------------------------------------------------------------------------
# Restriction
# ---------------------------------------------------------------------------

class RestrictedOracle(ConstraintOracle):
    """``{S ∈ base : S ⊆ allowed}``; a restriction of a matroid is a matroid."""

    kind = ConstraintKind.RESTRICTED

    def __init__(self, base: ConstraintOracle, allowed: Iterable[int]) -> None:
        super().__init__(base.n)
        self.base = base
        self.allowed = frozenset(allowed)
        self.is_matroid = base.is_matroid

    def _feasible(self, subset: FrozenSet[int]) -> bool:
        return subset <= self.allowed and self.base._feasible(subset)

    def max_weight_feasible(self, weights: Sequence[float]) -> Selection:
        self._check_weights(weights)
        masked = [w if i in self.allowed else 0.0 for i, w in enumerate(weights)]
        return self.base.max_weight_feasible(masked)

    def enumerate_feasible(self, guard: int = DEFAULT_ENUMERATION_GUARD,
                           within: Optional[Iterable[int]] = None) -> Iterator[FrozenSet[int]]:
        pool = self.allowed if within is None else self.allowed & frozenset(within)
        return super().enumerate_feasible(guard, within=pool)

    def describe(self) -> Dict:
        return {"kind": self.kind.value, "n": self.n, "allowed": sorted(self.allowed), "base": self.base.describe()}


def restrict(base: ConstraintOracle, allowed: Iterable[int]) -> RestrictedOracle:
    """Restrict, flattening nested restrictions."""
    allowed = frozenset(allowed)
    if isinstance(base, RestrictedOracle):
        return RestrictedOracle(base.base, base.allowed & allowed)
    return RestrictedOracle(base, allowed)


def unwrap(oracle: ConstraintOracle) -> Tuple[ConstraintOracle, FrozenSet[int]]:
    """Underlying unrestricted oracle and the allowed elements."""
    allowed = frozenset(range(oracle.n))
    while isinstance(oracle, RestrictedOracle):
        allowed &= oracle.allowed
        oracle = oracle.base
    return oracle, allowed


def capacity_one(oracle: ConstraintOracle) -> bool:
    """True for 1-uniform matroids (possibly restricted)."""
    base, _ = unwrap(oracle)
    return isinstance(base, KUniform) and base.k == 1


# ---------------------------------------------------------------------------
# Module-level operations
# ---------------------------------------------------------------------------

def is_feasible(oracle: ConstraintOracle, subset: Iterable[int]) -> bool:
    return oracle.is_feasible(subset)


def max_weight_feasible(oracle: ConstraintOracle, weights: Sequence[float]) -> Selection:
    return oracle.max_weight_feasible(weights)


def enumerate_feasible(oracle: ConstraintOracle, guard: int = DEFAULT_ENUMERATION_GUARD) -> List[FrozenSet[int]]:
    return list(oracle.enumerate_feasible(guard))


def is_matroid_kind(oracle: ConstraintOracle) -> bool:
    return bool(oracle.is_matroid)


def rank(oracle: ConstraintOracle, subset: Iterable[int]) -> int:
    """Size of a maximal independent subset; only defined for matroid kinds."""
    if not oracle.is_matroid:
        raise NotMatroid(f"rank is undefined for {oracle.kind.value} constraints")
    chosen: FrozenSet[int] = frozenset()
    for i in sorted(set(subset)):
        if oracle.is_feasible(chosen | {i}):
            chosen = chosen | {i}
    return len(chosen)
