"""The surrogate E[max_{I ∈ 𝓘} Σ_{i∈I} Z_i] with Z_i = min(X_i, τ^x_i).

It upper-bounds the optimal adaptive value on every downward-closed family
and equals it on matroids.  Evaluation strategy, cheapest first:

1. 1-uniform: exact, E[max(0, max_i Z_i)] from the product of CDFs.
2. Joint Z-profiles <= PANDORA_PROFILE_GUARD: exact enumeration.
3. Otherwise Monte Carlo (seed required) with a 95% interval.
"""

from __future__ import annotations

import logging
import math
from typing import FrozenSet, Optional, Sequence

import numpy as np

from pandora_delegation.config.settings import get_settings
from pandora_delegation.constraints.oracles import ConstraintOracle, capacity_one, unwrap
from pandora_delegation.core.distributions import Marginal
from pandora_delegation.core.model import CapValues, Instance, compute_caps
from pandora_delegation.core.numerics import Estimate
from pandora_delegation.core.profiles import chunked_generators, enumerate_law_profiles, sample_profile_batch, z_laws
from pandora_delegation.errors import BadParameters, TooLarge
from pandora_delegation.solvers.exact_dp import exact_optimal_dp

logger = logging.getLogger(__name__)


def expected_max_positive(laws: Sequence[Marginal]) -> float:
    """E[max(0, max_i V_i)] for independent discrete V_i."""
    levels = sorted({v for law in laws for v, _ in law if v > 0})

    def joint_cdf(level: float) -> float:
        return math.prod(sum(p for v, p in law if v <= level) for law in laws)

    total = 0.0
    previous = joint_cdf(0.0)
    for level in levels:
        current = joint_cdf(level)
        total += level * (current - previous)
        previous = current
    return total


def _restriction(oracle: ConstraintOracle, restrict_to: Optional[FrozenSet[int]]) -> FrozenSet[int]:
    _, allowed = unwrap(oracle)
    return allowed if restrict_to is None else allowed & frozenset(restrict_to)


def opt_surrogate(
    instance: Instance,
    samples: Optional[int] = None,
    seed: Optional[int] = None,
    exact: Optional[bool] = None,
    caps: Optional[CapValues] = None,
    restrict_to: Optional[FrozenSet[int]] = None,
    oracle: Optional[ConstraintOracle] = None,
) -> Estimate:
    """Surrogate value; ``restrict_to`` pins Z_i = 0 outside the given elements.

    ``exact=None`` picks the exact route when affordable and samples otherwise,
    ``exact=True`` raises ``TooLarge`` instead of sampling, ``exact=False``
    always samples.
    """
    oracle = oracle or instance.constraint
    caps = caps or compute_caps(instance)
    allowed = _restriction(oracle, restrict_to)
    laws = z_laws(instance, caps, allowed)

    if exact is not False:
        if capacity_one(oracle):
            return Estimate.exact_value(expected_max_positive(laws))
        try:
            total = 0.0
            for values, prob in enumerate_law_profiles(laws):
                total += prob * oracle.max_weight_feasible(list(values))[1]
            return Estimate.exact_value(total)
        except TooLarge:
            if exact:
                raise
            logger.info("opt_surrogate: exact enumeration too large, sampling")

    if seed is None:
        raise BadParameters("a seed is required for a sampled surrogate")
    samples = samples or get_settings().mc_samples
    mask = np.array([i in allowed for i in range(instance.n)], dtype=bool)
    tau = np.asarray(caps.tau_x, dtype=float)
    xs_by_element = [np.asarray([a.x for a in e.dist.atoms], dtype=float) for e in instance.elements]
    values = []
    one = capacity_one(oracle)
    for rng, size in chunked_generators(seed, samples):
        atoms, _ = sample_profile_batch(instance, rng, size)
        xs = np.column_stack([xs_by_element[i][atoms[:, i]] for i in range(instance.n)])
        z = np.where(mask, np.minimum(xs, tau), 0.0)
        if one:
            values.extend(np.maximum(z.max(axis=1), 0.0).tolist())
        else:
            values.extend(oracle.max_weight_feasible(row.tolist())[1] for row in z)
    return Estimate.from_samples(values)


# ---------------------------------------------------------------------------
# E[OPT]
# ---------------------------------------------------------------------------

def exact_opt_value(instance: Instance, guard: Optional[int] = None) -> float:
    """Optimal non-delegated value: surrogate on matroids, exact DP otherwise."""
    if instance.constraint.is_matroid:
        return opt_surrogate(instance, exact=True).mean
    return exact_optimal_dp(instance, guard=guard)


def opt_benchmark(instance: Instance, seed: Optional[int] = None, samples: Optional[int] = None) -> Estimate:
    """E[OPT] when computable; otherwise the sampled surrogate (exact on matroids, an upper bound elsewhere)."""
    try:
        return Estimate.exact_value(exact_opt_value(instance))
    except TooLarge:
        if seed is None:
            raise
        logger.info("opt_benchmark: falling back to the sampled surrogate")
        return opt_surrogate(instance, samples=samples, seed=seed, exact=False)
