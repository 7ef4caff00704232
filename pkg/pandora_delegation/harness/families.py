"""Instance families.

Every generator emits a finite instance.  Unbounded agent values are
replaced by the sentinel S (``PANDORA_SENTINEL``, default 1e9) and
continuous uniforms by two-point laws with the same conditional mean; the
inequality each family relies on is asserted when the instance is built.

| Family             | Model        | Constraint  | Elements                                               |
|--------------------|--------------|-------------|--------------------------------------------------------|
| standard_gap       | standard     | 1-uniform   | X = n w.p. 1/n, Y = M w.p. 1/M, c = 1 − ε              |
| free_agent_gap     | free_agent   | 1-uniform   | X = 1/p² w.p. p², Y ∈ {δ_i, S} half/half, c = 1 − p/2  |
| discounted_gap     | standard, δ  | 1-uniform   | X = n w.p. 1/n, Y = √n w.p. 1/√n, c = 1 − n^(−1/4)     |
| shared_cost_half   | shared_cost  | 1-uniform   | two elements, costs ε²                                 |
| agent_agnostic_gap | shared_cost  | 1-uniform   | X = √n w.p. 1/√n, Y depends on the announced c′        |
| random_matroid     | any          | k_uniform / partition / graphic | seeded random atoms            |
| random_knapsack    | any          | knapsack    | seeded random atoms and sizes                          |

Parameter defaults: standard_gap ε = 1/(2n), M = n/ε; free_agent_gap
p = n^(−1/4) (n a fourth power), δ_i = 1e-6·(1 + i); discounted_gap
discount 1 − 1/√n (n a perfect square).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np

from pandora_delegation.config.settings import get_settings
from pandora_delegation.constraints.oracles import (
    ConstraintOracle,
    Knapsack,
    KUniform,
    PartitionMatroid,
    graphic_matroid,
)
from pandora_delegation.core.model import Instance, ModelKind, UtilityModel, build_instance
from pandora_delegation.errors import BadParameters

logger = logging.getLogger(__name__)

TIE_SPREAD = 1e-6


class FamilyId(str, Enum):
    STANDARD_GAP = "standard_gap"
    FREE_AGENT_GAP = "free_agent_gap"
    DISCOUNTED_GAP = "discounted_gap"
    SHARED_COST_HALF = "shared_cost_half"
    AGENT_AGNOSTIC_GAP = "agent_agnostic_gap"
    RANDOM_MATROID = "random_matroid"
    RANDOM_KNAPSACK = "random_knapsack"


@dataclass(frozen=True)
class FamilySpec:
    family: FamilyId
    n: int
    eps: Optional[float] = None
    sentinel: Optional[float] = None
    seed: Optional[int] = None
    params: Dict[str, Any] = field(default_factory=dict)
    check_ranges: bool = True

    @property
    def big_value(self) -> float:
        return get_settings().sentinel if self.sentinel is None else float(self.sentinel)


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise BadParameters(message)


def integer_root(n: int, degree: int) -> Optional[int]:
    """r with r**degree == n, or None."""
    if n < 0:
        return None
    r = int(round(n ** (1.0 / degree)))
    for candidate in (r - 1, r, r + 1):
        if candidate >= 0 and candidate ** degree == n:
            return candidate
    return None


# ---------------------------------------------------------------------------
# Gap families
# ---------------------------------------------------------------------------

def standard_gap(spec: FamilySpec) -> Instance:
    n = spec.n
    _require(n >= 2, f"standard_gap needs n >= 2, got {n}")
    eps = 1.0 / (2 * n) if spec.eps is None else float(spec.eps)
    big_m = float(spec.params.get("M", n / eps))
    _require(0 < eps < 1 and big_m >= 1, f"standard_gap: eps={eps!r}, M={big_m!r} out of bounds")
    if spec.check_ranges:
        _require(eps <= 1.0 / (2 * n) + 1e-15, f"standard_gap: eps must be <= 1/(2n), got {eps!r}")
        _require(big_m >= n / eps - 1e-9, f"standard_gap: M must be >= n/eps, got {big_m!r}")
        # proposing agents who probe k >= 3 elements cost the principal more than they return
        for k in range(3, n + 1):
            slack = n * (1 - (1 - 1 / n) ** k) - k * (1 - eps)
            _require(slack < 0, f"standard_gap: k={k} branch is not negative ({slack!r})")

    x_law = [(float(n), 1.0 / n), (0.0, 1.0 - 1.0 / n)]
    y_law = [(big_m, 1.0 / big_m), (0.0, 1.0 - 1.0 / big_m)]
    atoms = [(x, y, px * py) for x, px in x_law for y, py in y_law]
    return build_instance(
        [atoms] * n,
        [1.0 - eps] * n,
        KUniform(n, 1),
        UtilityModel(ModelKind.STANDARD),
        name=f"standard_gap_n{n}",
    )


def free_agent_gap(spec: FamilySpec) -> Instance:
    n = spec.n
    root = integer_root(n, 4)
    _require(root is not None and root >= 2, f"free_agent_gap needs n a fourth power >= 16, got {n}")
    p = 1.0 / root
    big = spec.big_value
    if spec.check_ranges:
        _require(big > n / p**2, f"free_agent_gap: sentinel {big!r} must exceed n/p^2 = {n / p**2!r}")

    high = 1.0 / p**2
    atoms_per_element = []
    for i in range(n):
        low_y = TIE_SPREAD * (1 + i)
        atoms_per_element.append([
            (high, low_y, p**2 / 2),
            (high, big, p**2 / 2),
            (0.0, low_y, (1 - p**2) / 2),
            (0.0, big, (1 - p**2) / 2),
        ])
    return build_instance(
        atoms_per_element,
        [1.0 - p / 2] * n,
        KUniform(n, 1),
        UtilityModel(ModelKind.FREE_AGENT),
        name=f"free_agent_gap_n{n}",
    )


def discounted_gap(spec: FamilySpec) -> Instance:
    n = spec.n
    big_m = integer_root(n, 2)
    _require(big_m is not None and n > 1, f"discounted_gap needs n a perfect square > 1, got {n}")
    eps = n ** -0.25 if spec.eps is None else float(spec.eps)
    discount = 1.0 - 1.0 / big_m
    if spec.check_ranges:
        # an element whose zero-x outcome is rejected is never worth probing
        gain = 1.0 / n - (1.0 - eps) * (1.0 - discount)
        _require(gain < 0, f"discounted_gap: rejected-zero elements would still be probed ({gain!r})")

    x_law = [(float(n), 1.0 / n), (0.0, 1.0 - 1.0 / n)]
    y_law = [(float(big_m), 1.0 / big_m), (0.0, 1.0 - 1.0 / big_m)]
    atoms = [(x, y, px * py) for x, px in x_law for y, py in y_law]
    return build_instance(
        [atoms] * n,
        [1.0 - eps] * n,
        KUniform(n, 1),
        UtilityModel(ModelKind.STANDARD, discount=discount),
        name=f"discounted_gap_n{n}",
    )


def shared_cost_half(spec: FamilySpec) -> Instance:
    _require(spec.n == 2, f"shared_cost_half has exactly 2 elements, got n={spec.n}")
    eps = 0.1 if spec.eps is None else float(spec.eps)
    _require(0 < eps < 0.5, f"shared_cost_half needs 0 < eps < 1/2, got {eps!r}")
    _require(eps * (1 - eps) > eps**2, "shared_cost_half: agent participation fails")

    first = [(x, y, px * py)
             for x, px in [(1.0 / eps, eps), (0.0, 1.0 - eps)]
             for y, py in [(1.0 - eps, eps), (0.0, 1.0 - eps)]]
    second = [(1.0, 1.0, 1.0)]
    return build_instance(
        [first, second],
        [eps**2, eps**2],
        KUniform(2, 1),
        UtilityModel(ModelKind.SHARED_COST),
        name="shared_cost_half",
    )


def agent_agnostic_gap(spec: FamilySpec, division: Optional[Sequence[float]] = None) -> Instance:
    """Agent values depend on the announced shares; ``division=None`` means c′ = c."""
    n = spec.n
    root = integer_root(n, 4)
    _require(root is not None and root >= 2, f"agent_agnostic_gap needs n a fourth power >= 16, got {n}")
    sqrt_n = float(root * root)
    cost = 1.0 - 2.0 / root
    big = spec.big_value
    division = [cost] * n if division is None else [float(v) for v in division]
    _require(len(division) == n, "agent_agnostic_gap: one share per element")
    _require(all(-1e-12 <= s <= cost + 1e-12 for s in division), "agent_agnostic_gap: shares must lie in [0, c]")
    if spec.check_ranges:
        _require(big > n**2, f"agent_agnostic_gap: sentinel {big!r} must exceed n^2")

    hit = 1.0 / sqrt_n
    atoms_per_element: List[list] = []
    for i, share in enumerate(division):
        if share > 0:
            # Y | X = √n is uniform on [0, c′/2]; Y | X = 0 is n²
            atoms_per_element.append([
                (sqrt_n, 0.0, hit / 2),
                (sqrt_n, share / 2, hit / 2),
                (0.0, float(n) ** 2, 1.0 - hit),
            ])
        else:
            # Y uniform on [S, 3S] independent of X
            low, high = big * (1 + TIE_SPREAD * (1 + i)), 3 * big * (1 + TIE_SPREAD * (1 + i))
            atoms_per_element.append([
                (sqrt_n, low, hit / 2),
                (sqrt_n, high, hit / 2),
                (0.0, low, (1 - hit) / 2),
                (0.0, high, (1 - hit) / 2),
            ])
    return build_instance(
        atoms_per_element,
        [cost] * n,
        KUniform(n, 1),
        UtilityModel(ModelKind.SHARED_COST, cost_division=tuple(division)),
        name=f"agent_agnostic_gap_n{n}",
    )


# ---------------------------------------------------------------------------
# Random families
# ---------------------------------------------------------------------------

def _model_from_params(params: Dict[str, Any]) -> UtilityModel:
    try:
        kind = ModelKind(params.get("model", ModelKind.STANDARD.value))
    except ValueError as exc:
        raise BadParameters(f"unknown model {params.get('model')!r}") from exc
    return UtilityModel(kind, discount=float(params.get("discount", 0.0)))


def _random_element(rng: np.random.Generator, model: UtilityModel, support: int, cost_fraction: float):
    if model.kind is ModelKind.BINARY:
        x = float(rng.integers(1, 11))
        y = float(rng.integers(1, 11))
        q = round(float(rng.uniform(0.1, 0.9)), 2)
        atoms = [(x, y, q), (0.0, 0.0, 1.0 - q)]
    else:
        xs = rng.integers(0, 11, size=support).astype(float)
        ys = rng.integers(0, 11, size=support).astype(float)
        xs[0] = max(xs[0], 1.0)
        ys[0] = max(ys[0], 1.0)
        probs = rng.dirichlet(np.ones(support))
        probs = probs / probs.sum()
        atoms = [(float(x), float(y), float(p)) for x, y, p in zip(xs, ys, probs)]
    mean_x = sum(x * p for x, _, p in atoms)
    mean_y = sum(y * p for _, y, p in atoms)
    return atoms, cost_fraction * min(mean_x, mean_y)


def _random_elements(spec: FamilySpec, rng: np.random.Generator, model: UtilityModel):
    support = int(spec.params.get("support", 3))
    cost_fraction = float(spec.params.get("cost_fraction", 0.5))
    _require(support >= 1, f"support must be >= 1, got {support}")
    _require(0 <= cost_fraction < 1, f"cost_fraction must lie in [0, 1), got {cost_fraction!r}")
    drawn = [_random_element(rng, model, support, cost_fraction) for _ in range(spec.n)]
    return [atoms for atoms, _ in drawn], [cost for _, cost in drawn]


def _random_matroid_constraint(spec: FamilySpec, rng: np.random.Generator) -> ConstraintOracle:
    n = spec.n
    kind = spec.params.get("kind", "partition")
    if kind == "k_uniform":
        return KUniform(n, int(spec.params.get("k", 1)))
    if kind == "partition":
        n_blocks = int(spec.params.get("blocks", max(1, n // 2)))
        _require(1 <= n_blocks <= n, f"blocks must lie in [1, n], got {n_blocks}")
        labels = np.concatenate([np.arange(n_blocks), rng.integers(0, n_blocks, size=n - n_blocks)])
        rng.shuffle(labels)
        blocks = [[i for i in range(n) if labels[i] == b] for b in range(n_blocks)]
        return PartitionMatroid(n, blocks, [int(spec.params.get("block_cap", 1))] * n_blocks)
    if kind == "graphic":
        vertices = max(2, n // 2 + 1)
        edges = [tuple(int(v) for v in rng.choice(vertices, size=2, replace=False)) for _ in range(n)]
        return graphic_matroid(edges)
    raise BadParameters(f"random_matroid kind must be k_uniform, partition or graphic, got {kind!r}")


def random_matroid(spec: FamilySpec) -> Instance:
    _require(spec.seed is not None, "random_matroid needs a seed")
    _require(spec.n >= 1, f"n must be >= 1, got {spec.n}")
    rng = np.random.default_rng(spec.seed)
    model = _model_from_params(spec.params)
    atoms, costs = _random_elements(spec, rng, model)
    constraint = _random_matroid_constraint(spec, rng)
    return build_instance(atoms, costs, constraint, model, name=f"random_matroid_n{spec.n}_s{spec.seed}")


def random_knapsack(spec: FamilySpec) -> Instance:
    _require(spec.seed is not None, "random_knapsack needs a seed")
    _require(spec.n >= 1, f"n must be >= 1, got {spec.n}")
    rng = np.random.default_rng(spec.seed)
    model = _model_from_params(spec.params)
    atoms, costs = _random_elements(spec, rng, model)
    sizes = [round(float(s), 2) for s in rng.uniform(0.05, 0.95, size=spec.n)]
    return build_instance(
        atoms, costs, Knapsack(sizes, 1.0), model, name=f"random_knapsack_n{spec.n}_s{spec.seed}"
    )


# ---------------------------------------------------------------------------
# Dispatch
# ---------------------------------------------------------------------------

_GENERATORS: Dict[FamilyId, Callable[[FamilySpec], Instance]] = {
    FamilyId.STANDARD_GAP: standard_gap,
    FamilyId.FREE_AGENT_GAP: free_agent_gap,
    FamilyId.DISCOUNTED_GAP: discounted_gap,
    FamilyId.SHARED_COST_HALF: shared_cost_half,
    FamilyId.AGENT_AGNOSTIC_GAP: agent_agnostic_gap,
    FamilyId.RANDOM_MATROID: random_matroid,
    FamilyId.RANDOM_KNAPSACK: random_knapsack,
}


def generate_family(spec: FamilySpec) -> Instance:
    instance = _GENERATORS[FamilyId(spec.family)](spec)
    logger.debug("generate_family: %s n=%d", instance.name, instance.n)
    return instance


def share_dependent(spec: FamilySpec) -> Optional[Callable[[Sequence[float]], Instance]]:
    """Instance factory over cost divisions for families whose agent values depend on them."""
    if FamilyId(spec.family) is FamilyId.AGENT_AGNOSTIC_GAP:
        return lambda division: agent_agnostic_gap(spec, division)
    return None


def parse_family(name: str) -> FamilyId:
    try:
        return FamilyId(name)
    except ValueError as exc:
        known = ", ".join(f.value for f in FamilyId)
        raise BadParameters(f"unknown family {name!r} (known: {known})") from exc
