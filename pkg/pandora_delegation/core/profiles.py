"""Realization profiles, seeded sampling and exact profile enumeration.

A profile fixes, for every element, the atom index of its outcome and a
tag in [0, 1) used to derandomize threshold acceptance.

Seeded sampling is chunked: a run of N samples is split into fixed chunks
of ``SAMPLE_CHUNK`` and chunk k draws from the k-th child of
``SeedSequence(seed)``.  The stream therefore depends only on the seed and
N, never on how many workers consume the chunks.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np

from pandora_delegation.config.settings import SAMPLE_CHUNK, get_settings
from pandora_delegation.core.distributions import Marginal
from pandora_delegation.core.model import CapValues, Instance
from pandora_delegation.errors import BadParameters, TooLarge

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RealizationProfile:
    atoms: Tuple[int, ...]
    tags: Tuple[float, ...]
    xs: Tuple[float, ...]
    ys: Tuple[float, ...]

    @classmethod
    def from_atoms(
        cls, instance: Instance, atoms: Sequence[int], tags: Optional[Sequence[float]] = None
    ) -> "RealizationProfile":
        atoms = tuple(int(a) for a in atoms)
        tags = tuple(float(t) for t in tags) if tags is not None else tuple(0.5 for _ in atoms)
        xs = tuple(instance.elements[i].dist.atoms[a].x for i, a in enumerate(atoms))
        ys = tuple(instance.elements[i].dist.atoms[a].y for i, a in enumerate(atoms))
        return cls(atoms, tags, xs, ys)


def truncated_value(
    profile: RealizationProfile, caps: CapValues, element: int, side: str = "principal"
) -> float:
    """κ = min(value, τ) for the principal (x, τ^x) or the agent (y, τ^y)."""
    if side == "principal":
        return min(profile.xs[element], caps.tau_x[element])
    if side == "agent":
        return min(profile.ys[element], caps.tau_y[element])
    raise BadParameters(f"side must be 'principal' or 'agent', got {side!r}")


# ---------------------------------------------------------------------------
# Sampling
# ---------------------------------------------------------------------------

def _cumulative(instance: Instance) -> List[np.ndarray]:
    cums = []
    for e in instance.elements:
        cum = np.cumsum(np.asarray(e.dist.probabilities, dtype=float))
        cum[-1] = 1.0
        cums.append(cum)
    return cums


def sample_profile_batch(instance: Instance, rng: np.random.Generator, count: int) -> Tuple[np.ndarray, np.ndarray]:
    """Draw ``count`` profiles at once: (atom indices, tags), both shaped (count, n)."""
    n = instance.n
    uniforms = rng.random((count, n))
    tags = rng.random((count, n))
    atoms = np.empty((count, n), dtype=np.int64)
    for i, cum in enumerate(_cumulative(instance)):
        atoms[:, i] = np.minimum(np.searchsorted(cum, uniforms[:, i], side="right"), len(cum) - 1)
    return atoms, tags


def sample_profile(instance: Instance, rng: np.random.Generator) -> RealizationProfile:
    atoms, tags = sample_profile_batch(instance, rng, 1)
    return RealizationProfile.from_atoms(instance, atoms[0], tags[0])


def chunked_generators(seed: int, total: int, chunk: int = SAMPLE_CHUNK) -> Iterator[Tuple[np.random.Generator, int]]:
    """Yield (generator, size) per fixed-size chunk of a seeded run."""
    if total <= 0:
        return
    n_chunks = math.ceil(total / chunk)
    children = np.random.SeedSequence(seed).spawn(n_chunks)
    for k, child in enumerate(children):
        size = min(chunk, total - k * chunk)
        yield np.random.default_rng(child), size


def iter_sampled_profiles(instance: Instance, seed: int, total: int) -> Iterator[RealizationProfile]:
    for rng, size in chunked_generators(seed, total):
        atoms, tags = sample_profile_batch(instance, rng, size)
        for row_atoms, row_tags in zip(atoms, tags):
            yield RealizationProfile.from_atoms(instance, row_atoms, row_tags)


# ---------------------------------------------------------------------------
# Exact enumeration
# ---------------------------------------------------------------------------

def check_profile_count(sizes: Sequence[int], guard: Optional[int] = None, what: str = "profiles") -> int:
    guard = get_settings().profile_guard if guard is None else guard
    total = 1
    for s in sizes:
        total *= max(int(s), 1)
        if total > guard:
            raise TooLarge(f"{what}: more than {guard} joint combinations")
    return total


def enumerate_atom_profiles(instance: Instance, guard: Optional[int] = None) -> Iterator[Tuple[Tuple[int, ...], float]]:
    """All joint atom choices with their probabilities."""
    sizes = [e.dist.support_size for e in instance.elements]
    check_profile_count(sizes, guard)
    probs = [e.dist.probabilities for e in instance.elements]
    for combo in itertools.product(*(range(s) for s in sizes)):
        prob = 1.0
        for i, a in enumerate(combo):
            prob *= probs[i][a]
        yield combo, prob


def z_laws(instance: Instance, caps: CapValues, restrict_to: Optional[frozenset] = None) -> List[Marginal]:
    """Law of Z_i = min(X_i, τ^x_i); elements outside ``restrict_to`` are pinned at 0."""
    laws = []
    for i, e in enumerate(instance.elements):
        if restrict_to is not None and i not in restrict_to:
            laws.append(((0.0, 1.0),))
        else:
            laws.append(e.dist.truncated(caps.tau_x[i]))
    return laws


def enumerate_law_profiles(laws: Sequence[Marginal], guard: Optional[int] = None) -> Iterator[Tuple[Tuple[float, ...], float]]:
    """Joint values of independent discrete laws with their probabilities."""
    check_profile_count([len(law) for law in laws], guard)
    for combo in itertools.product(*laws):
        prob = 1.0
        for _, p in combo:
            prob *= p
        yield tuple(v for v, _ in combo), prob
