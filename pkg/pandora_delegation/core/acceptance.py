"""Per-element acceptance rules and their refinement into outcome pieces.

A rule decides whether a realized outcome of one element may appear in an
accepted proposal.  Randomized acceptance at a threshold is made
deterministic through the element's tag u ~ U[0, 1): an outcome whose
truncated value sits exactly at the threshold t is accepted iff u < q.

``refine_outcomes`` splits each atom whose acceptance fraction lies strictly
between 0 and 1 into an accepted piece (tag q/2) and a rejected piece
(tag (1 + q)/2), so that exact enumeration over pieces reproduces the
tag-based rule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import FrozenSet, Optional, Tuple, Union

from pandora_delegation.core.distributions import FiniteJointDistribution
from pandora_delegation.core.numerics import approx_equal


@dataclass(frozen=True)
class ThresholdRule:
    """Accept iff min(x, cap) > t, or min(x, cap) == t and tag < q."""

    t: float
    q: float = 1.0
    cap: float = math.inf

    def value(self, x: float) -> float:
        return min(x, self.cap)

    def acceptance_fraction(self, x: float, atom: Optional[int] = None) -> float:
        z = self.value(x)
        if approx_equal(z, self.t):
            return self.q
        return 1.0 if z > self.t else 0.0

    def accepts(self, x: float, atom: Optional[int], tag: float) -> bool:
        z = self.value(x)
        if approx_equal(z, self.t):
            return tag < self.q
        return z > self.t

    def admits_value(self, v: float) -> bool:
        """Whether a value v (e.g. a cap) passes the rule with positive probability."""
        if approx_equal(v, self.t):
            return self.q > 0
        return v > self.t


@dataclass(frozen=True)
class OutcomeSetRule:
    """Accept exactly the listed atom indices of the element's distribution."""

    atoms: FrozenSet[int]

    def acceptance_fraction(self, x: float, atom: Optional[int] = None) -> float:
        return 1.0 if atom in self.atoms else 0.0

    def accepts(self, x: float, atom: Optional[int], tag: float) -> bool:
        return atom in self.atoms

    def admits_value(self, v: float) -> bool:
        return bool(self.atoms)


AcceptanceRule = Union[ThresholdRule, OutcomeSetRule]


def clamp_nonpositive_threshold(rule: ThresholdRule, dist: FiniteJointDistribution) -> ThresholdRule:
    """A threshold at or below zero would accept zero-value outcomes; lift it
    to the smallest positive truncated value with full acceptance."""
    if rule.t > 0 and not approx_equal(rule.t, 0.0):
        return rule
    positives = [v for v, _ in dist.truncated(rule.cap) if v > 0 and not approx_equal(v, 0.0)]
    if not positives:
        return ThresholdRule(t=math.inf, q=0.0, cap=rule.cap)
    return ThresholdRule(t=min(positives), q=1.0, cap=rule.cap)


# ---------------------------------------------------------------------------
# Refinement
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Piece:
    atom: int
    x: float
    y: float
    prob: float
    accepted: bool
    tag: float


def refine_outcomes(dist: FiniteJointDistribution, rule: Optional[AcceptanceRule]) -> Tuple[Piece, ...]:
    pieces = []
    for idx, atom in enumerate(dist.atoms):
        frac = 0.0 if rule is None else rule.acceptance_fraction(atom.x, idx)
        if frac >= 1.0:
            pieces.append(Piece(idx, atom.x, atom.y, atom.p, True, 0.5))
        elif frac <= 0.0:
            pieces.append(Piece(idx, atom.x, atom.y, atom.p, False, 0.5))
        else:
            pieces.append(Piece(idx, atom.x, atom.y, atom.p * frac, True, frac / 2.0))
            pieces.append(Piece(idx, atom.x, atom.y, atom.p * (1.0 - frac), False, (1.0 + frac) / 2.0))
    return tuple(pieces)


def acceptance_probability(dist: FiniteJointDistribution, rule: Optional[AcceptanceRule]) -> float:
    if rule is None:
        return 0.0
    return sum(a.p * rule.acceptance_fraction(a.x, i) for i, a in enumerate(dist.atoms))
