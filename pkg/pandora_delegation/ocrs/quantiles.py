"""Quantile thresholds for discrete laws."""

from __future__ import annotations

from typing import Sequence, Tuple

from pandora_delegation.errors import BadParameters

_MASS_TOL = 1e-12


def quantile_threshold(law: Sequence[Tuple[float, float]], p: float) -> Tuple[float, float]:
    """Return (t, q) with Pr[Z > t] + q·Pr[Z = t] = p.

    Walks the atoms from the top and stops at the first one where the
    cumulative mass reaches p.  ``p == 0`` gives (max support, 0).
    """
    if not 0.0 <= p <= 1.0 + _MASS_TOL:
        raise BadParameters(f"quantile mass must lie in [0, 1], got {p!r}")
    descending = sorted(law, key=lambda pair: -pair[0])
    if p <= 0.0:
        return descending[0][0], 0.0
    above = 0.0
    for value, prob in descending:
        if above + prob >= p - _MASS_TOL:
            q = (p - above) / prob if prob > 0 else 1.0
            return value, min(max(q, 0.0), 1.0)
        above += prob
    return descending[-1][0], 1.0


def top_mass_value(law: Sequence[Tuple[float, float]], p: float) -> float:
    """g(p) = E[Z · 1(Z in its top-p quantile)], the concave objective term."""
    if p <= 0:
        return 0.0
    total = 0.0
    remaining = p
    for value, prob in sorted(law, key=lambda pair: -pair[0]):
        take = min(prob, remaining)
        total += value * take
        remaining -= take
        if remaining <= _MASS_TOL:
            break
    return total
