"""Ex-ante probability vectors p ∈ P_𝓘.

Two constructions:

* ``ex_ante_membership``: p_i = Pr[i ∈ I*], where I* is the max-weight
  feasible set under Z (matroids: greedy over (−Z, id); knapsack: the exact
  routine).  Closed form for 1-uniform, enumeration when the joint Z space
  is small, Monte Carlo otherwise.
* ``ex_ante_concave``: maximizes Σ_i g_i(p_i) over P_𝓘, with g_i the
  piecewise-linear concave function whose segments are (slope z_j,
  length Pr[Z_i = z_j]) in decreasing z.  Polymatroids take the greedy
  slope allocation; knapsack uses the LP relaxation with the extra
  "at most one big element" row, solved by scipy's HiGHS backend.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from typing import Callable, Dict, FrozenSet, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import linprog

from pandora_delegation.config.settings import get_settings
from pandora_delegation.constraints.oracles import (
    ConstraintOracle,
    Knapsack,
    KUniform,
    MatroidByOracle,
    PartitionMatroid,
    capacity_one,
    rank,
    unwrap,
)
from pandora_delegation.core.distributions import Marginal
from pandora_delegation.core.model import CapValues, Instance, compute_caps
from pandora_delegation.core.profiles import chunked_generators, enumerate_law_profiles, sample_profile_batch, z_laws
from pandora_delegation.errors import BadParameters, SolverFailure, TooLarge, UnsupportedConstraint
from pandora_delegation.ocrs.quantiles import top_mass_value

logger = logging.getLogger(__name__)

MAX_ORACLE_MATROID = 12
MAX_POLYTOPE_CHECK = 12


@dataclass(frozen=True)
class ExAnteVector:
    p: Tuple[float, ...]
    method: str          # closed_form | enumeration | sampled | greedy | lp
    samples: int = 0

    def support(self) -> FrozenSet[int]:
        return frozenset(i for i, v in enumerate(self.p) if v > 0)

    def restricted(self, keep: FrozenSet[int]) -> "ExAnteVector":
        return ExAnteVector(tuple(v if i in keep else 0.0 for i, v in enumerate(self.p)), self.method, self.samples)


# ---------------------------------------------------------------------------
# Membership probabilities
# ---------------------------------------------------------------------------

def _single_choice_membership(laws: Sequence[Marginal]) -> List[float]:
    """Pr[i is the lowest-id maximizer of a positive Z] for independent laws."""
    n = len(laws)
    p = [0.0] * n
    for i, law in enumerate(laws):
        for z, prob in law:
            if z <= 0:
                continue
            lower = math.prod(sum(q for v, q in laws[j] if v < z) for j in range(i))
            upper = math.prod(sum(q for v, q in laws[j] if v <= z) for j in range(i + 1, n))
            p[i] += prob * lower * upper
    return p


def ex_ante_membership(
    instance: Instance,
    samples: Optional[int] = None,
    seed: Optional[int] = None,
    exact: Optional[bool] = None,
    caps: Optional[CapValues] = None,
) -> ExAnteVector:
    oracle = instance.constraint
    caps = caps or compute_caps(instance)
    _, allowed = unwrap(oracle)
    laws = z_laws(instance, caps, allowed)
    n = instance.n

    if exact is not False:
        if capacity_one(oracle):
            return ExAnteVector(tuple(_single_choice_membership(laws)), "closed_form")
        try:
            p = [0.0] * n
            for values, prob in enumerate_law_profiles(laws):
                chosen, _ = oracle.max_weight_feasible(list(values))
                for i in chosen:
                    p[i] += prob
            return ExAnteVector(tuple(p), "enumeration")
        except TooLarge:
            if exact:
                raise
            logger.info("ex_ante_membership: enumeration too large, sampling")

    if seed is None:
        raise BadParameters("a seed is required for sampled ex-ante probabilities")
    samples = samples or get_settings().mc_samples
    tau = np.asarray(caps.tau_x, dtype=float)
    mask = np.array([i in allowed for i in range(n)], dtype=bool)
    xs_by_element = [np.asarray([a.x for a in e.dist.atoms], dtype=float) for e in instance.elements]
    counts = np.zeros(n)
    for rng, size in chunked_generators(seed, samples):
        atoms, _ = sample_profile_batch(instance, rng, size)
        xs = np.column_stack([xs_by_element[i][atoms[:, i]] for i in range(n)])
        z = np.where(mask, np.minimum(xs, tau), 0.0)
        for row in z:
            chosen, _ = oracle.max_weight_feasible(row.tolist())
            for i in chosen:
                counts[i] += 1
    return ExAnteVector(tuple((counts / samples).tolist()), "sampled", samples)


# ---------------------------------------------------------------------------
# Concave maximization
# ---------------------------------------------------------------------------

Segment = Tuple[float, float, int]  # (slope, length, element)


def _segments(laws: Sequence[Marginal], allowed: FrozenSet[int]) -> List[Segment]:
    segs = []
    for i, law in enumerate(laws):
        if i not in allowed:
            continue
        for z, prob in sorted(law, key=lambda pair: -pair[0]):
            if z > 0 and prob > 0:
                segs.append((z, prob, i))
    return segs


def _oracle_matroid_headroom(base: MatroidByOracle, n: int) -> Callable[[int, List[float]], float]:
    if n > MAX_ORACLE_MATROID:
        raise TooLarge(f"rank-based allocation is limited to {MAX_ORACLE_MATROID} elements")
    ranks: Dict[FrozenSet[int], int] = {}
    for r in range(1, n + 1):
        for combo in itertools.combinations(range(n), r):
            ranks[frozenset(combo)] = rank(base, combo)

    def headroom(i: int, q: List[float]) -> float:
        return min(rank - sum(q[j] for j in s) for s, rank in ranks.items() if i in s)

    return headroom


def _greedy_allocation(segs: List[Segment], n: int, headroom: Callable[[int, List[float]], float]) -> List[float]:
    q = [0.0] * n
    for slope, length, i in sorted(segs, key=lambda s: (-s[0], s[2])):
        room = min(length, 1.0 - q[i], headroom(i, q))
        if room > 0:
            q[i] += room
    return q


def _knapsack_lp(segs: List[Segment], base: Knapsack, n: int) -> List[float]:
    if not segs:
        return [0.0] * n
    c = np.array([-slope for slope, _, _ in segs])
    rows = [[base.sizes[i] for _, _, i in segs]]
    rhs = [base.budget]
    big = [1.0 if base.is_big(i) else 0.0 for _, _, i in segs]
    if any(big):
        rows.append(big)
        rhs.append(1.0)
    for e in sorted({i for _, _, i in segs}):
        rows.append([1.0 if i == e else 0.0 for _, _, i in segs])
        rhs.append(1.0)
    result = linprog(
        c,
        A_ub=np.array(rows),
        b_ub=np.array(rhs),
        bounds=[(0.0, length) for _, length, _ in segs],
        method="highs",
    )
    if result.status != 0:
        raise SolverFailure(f"knapsack ex-ante LP failed: {result.message}")
    q = [0.0] * n
    for (_, _, i), value in zip(segs, result.x):
        q[i] += float(value)
    return q


def ex_ante_concave(
    instance: Instance,
    caps: Optional[CapValues] = None,
    restrict_to: Optional[FrozenSet[int]] = None,
) -> ExAnteVector:
    caps = caps or compute_caps(instance)
    base, allowed = unwrap(instance.constraint)
    if restrict_to is not None:
        allowed = allowed & frozenset(restrict_to)
    laws = z_laws(instance, caps, allowed)
    segs = _segments(laws, allowed)
    n = instance.n

    if isinstance(base, KUniform):
        q = _greedy_allocation(segs, n, lambda i, cur: base.k - sum(cur))
        method = "greedy"
    elif isinstance(base, PartitionMatroid):
        def block_room(i: int, cur: List[float]) -> float:
            b = base.block_of[i]
            return base.caps[b] - sum(cur[j] for j in base.blocks[b])
        q = _greedy_allocation(segs, n, block_room)
        method = "greedy"
    elif isinstance(base, MatroidByOracle):
        q = _greedy_allocation(segs, n, _oracle_matroid_headroom(base, n))
        method = "greedy"
    elif isinstance(base, Knapsack):
        q = _knapsack_lp(segs, base, n)
        method = "lp"
    else:
        raise UnsupportedConstraint(f"no concave ex-ante routine for {base.kind.value}")
    return ExAnteVector(tuple(min(max(v, 0.0), 1.0) for v in q), method)


def concave_objective(instance: Instance, p: Sequence[float], caps: Optional[CapValues] = None) -> float:
    """Σ_i g_i(p_i); g_i(p_i) is the expected Z_i mass in its top-p_i quantile."""
    caps = caps or compute_caps(instance)
    laws = z_laws(instance, caps)
    return sum(top_mass_value(law, pi) for law, pi in zip(laws, p))


# ---------------------------------------------------------------------------
# Polytope membership
# ---------------------------------------------------------------------------

def in_polytope(oracle: ConstraintOracle, p: Sequence[float], tol: float = 1e-7) -> bool:
    """Whether p lies in the convex hull of feasible indicator vectors.

    The family is downward closed, so it is enough to find a convex
    combination of feasible sets dominating p coordinate-wise.
    """
    if any(v < -tol or v > 1 + tol for v in p):
        return False
    sets = list(oracle.enumerate_feasible(guard=MAX_POLYTOPE_CHECK))
    n = oracle.n
    coverage = np.array([[1.0 if i in s else 0.0 for s in sets] for i in range(n)])
    result = linprog(
        np.zeros(len(sets)),
        A_ub=-coverage,
        b_ub=-(np.asarray(p, dtype=float) - tol),
        A_eq=np.ones((1, len(sets))),
        b_eq=np.array([1.0]),
        bounds=[(0.0, None)] * len(sets),
        method="highs",
    )
    return result.status == 0
