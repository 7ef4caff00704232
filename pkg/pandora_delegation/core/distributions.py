"""Finite joint distributions over (principal value, agent value) pairs.

Each element's outcome is a pair ``(x, y)`` drawn from a finite list of atoms.
The distribution type is deliberately lenient: ``FiniteJointDistribution``
accepts malformed input so that ``validate`` can report every problem at
once, while ``FiniteJointDistribution.of`` is the strict constructor used by
code that needs a well-formed law.

Cap values
----------
For a marginal law V and cost c the cap value τ is the smallest τ with
E[(V − τ)+] = c.  ``cap_value`` computes it exactly by scanning the support
breakpoints from the top: on the segment just below breakpoint v_j the
function equals S_j − P_j·τ, where S_j and P_j are the tail sum and tail mass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, List, Sequence, Tuple, Union

from pandora_delegation.core.numerics import approx_equal, tolerance
from pandora_delegation.errors import BadParameters, InvalidDistribution, NegativeCap

# A discrete univariate law: ((value, probability), ...) sorted by value ascending.
Marginal = Tuple[Tuple[float, float], ...]


@dataclass(frozen=True)
class Atom:
    x: float  # principal value
    y: float  # agent value
    p: float


AtomLike = Union[Atom, Sequence[float]]


def _as_atom(raw: AtomLike) -> Atom:
    if isinstance(raw, Atom):
        return raw
    if len(raw) != 3:
        raise InvalidDistribution(f"atom must be (x, y, p), got {raw!r}")
    x, y, p = raw
    return Atom(float(x), float(y), float(p))


def merge_law(pairs: Iterable[Tuple[float, float]]) -> Marginal:
    """Merge equal values and sort ascending."""
    acc: dict = {}
    for value, prob in pairs:
        acc[value] = acc.get(value, 0.0) + prob
    return tuple(sorted(acc.items()))


@dataclass(frozen=True)
class FiniteJointDistribution:
    atoms: Tuple[Atom, ...]

    # -----------------------------------------------------------------------
    # Construction
    # -----------------------------------------------------------------------

    @classmethod
    def lenient(cls, atoms: Iterable[AtomLike]) -> "FiniteJointDistribution":
        """Build without checks; duplicate (x, y) atoms are merged in first-seen order."""
        merged: dict = {}
        for raw in atoms:
            atom = _as_atom(raw)
            key = (atom.x, atom.y)
            merged[key] = merged.get(key, 0.0) + atom.p
        return cls(tuple(Atom(x, y, p) for (x, y), p in merged.items()))

    @classmethod
    def of(cls, atoms: Iterable[AtomLike]) -> "FiniteJointDistribution":
        dist = cls.lenient(atoms)
        problems = dist.issues()
        if problems:
            raise InvalidDistribution("; ".join(problems))
        return dist

    @classmethod
    def independent(
        cls, x_law: Sequence[Tuple[float, float]], y_law: Sequence[Tuple[float, float]]
    ) -> "FiniteJointDistribution":
        """Product of two marginals."""
        return cls.of((x, y, px * py) for x, px in x_law for y, py in y_law)

    def issues(self) -> List[str]:
        problems: List[str] = []
        if not self.atoms:
            return ["distribution has no atoms"]
        for idx, atom in enumerate(self.atoms):
            if not all(math.isfinite(v) for v in (atom.x, atom.y, atom.p)):
                problems.append(f"atom {idx} has a non-finite entry")
            elif atom.p <= 0:
                problems.append(f"atom {idx} has probability {atom.p} <= 0")
            if atom.x < 0 or atom.y < 0:
                problems.append(f"atom {idx} has a negative value")
        total = sum(a.p for a in self.atoms)
        if not approx_equal(total, 1.0, max(tolerance(), 1e-9)):
            problems.append(f"probabilities sum to {total!r}, expected 1")
        return problems

    # -----------------------------------------------------------------------
    # Views
    # -----------------------------------------------------------------------

    @property
    def support_size(self) -> int:
        return len(self.atoms)

    @property
    def probabilities(self) -> Tuple[float, ...]:
        return tuple(a.p for a in self.atoms)

    def marginal_x(self) -> Marginal:
        return merge_law((a.x, a.p) for a in self.atoms)

    def marginal_y(self) -> Marginal:
        return merge_law((a.y, a.p) for a in self.atoms)

    def mean_x(self) -> float:
        return sum(a.x * a.p for a in self.atoms)

    def mean_y(self) -> float:
        return sum(a.y * a.p for a in self.atoms)

    def truncated(self, cap: float) -> Marginal:
        """Law of Z = min(X, cap)."""
        return merge_law((min(a.x, cap), a.p) for a in self.atoms)


# ---------------------------------------------------------------------------
# Cap value
# ---------------------------------------------------------------------------

def law_mean(law: Sequence[Tuple[float, float]]) -> float:
    return sum(v * p for v, p in law)


def cap_value(
    law: Sequence[Tuple[float, float]],
    cost: float,
    allow_negative: bool = False,
) -> float:
    """Smallest τ with E[(V − τ)+] = cost.

    ``cost == 0`` gives the maximum of the support.  When cost exceeds E[V]
    no non-negative τ exists: ``NegativeCap`` is raised unless
    ``allow_negative`` is set, in which case E[V] − cost is returned (the
    value of probing and always keeping the outcome, which is negative).
    """
    if cost < 0 or not math.isfinite(cost):
        raise BadParameters(f"cost must be finite and non-negative, got {cost!r}")
    values = merge_law(law)
    if not values:
        raise InvalidDistribution("empty law")
    if cost == 0:
        return values[-1][0]
    mean = law_mean(values)
    if cost > mean and not approx_equal(cost, mean):
        if allow_negative:
            return mean - cost
        raise NegativeCap(f"cost {cost!r} exceeds mean {mean!r}")

    tail_p = 0.0
    tail_s = 0.0
    for j in range(len(values) - 1, -1, -1):
        v_j, p_j = values[j]
        tail_p += p_j
        tail_s += v_j * p_j
        lower = values[j - 1][0] if j > 0 else -math.inf
        if j == 0 or tail_s - tail_p * lower >= cost:
            tau = (tail_s - cost) / tail_p
            tau = min(max(tau, lower), v_j)
            if tau < 0:
                # only reachable when cost ~= mean
                return mean - cost if allow_negative and mean < cost else 0.0
            return tau
    raise AssertionError("unreachable")  # pragma: no cover


def expected_excess(law: Sequence[Tuple[float, float]], tau: float) -> float:
    """E[(V − τ)+]."""
    return sum(p * max(v - tau, 0.0) for v, p in law)
