"""Tolerant float comparison and the Estimate value type."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from pandora_delegation.config.settings import get_settings


def tolerance() -> float:
    return get_settings().tolerance


def approx_equal(a: float, b: float, tol: Optional[float] = None) -> bool:
    """Absolute tolerance near zero, relative for large magnitudes (sentinels)."""
    if a == b:
        return True
    if not (math.isfinite(a) and math.isfinite(b)):
        return False
    tol = tolerance() if tol is None else tol
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


def strictly_greater(a: float, b: float, tol: Optional[float] = None) -> bool:
    return a > b and not approx_equal(a, b, tol)


def is_positive(a: float, tol: Optional[float] = None) -> bool:
    return strictly_greater(a, 0.0, tol)


@dataclass(frozen=True)
class Estimate:
    """A point value with a 95% interval; ``samples == 0`` marks an exact value."""

    mean: float
    lo: float
    hi: float
    samples: int = 0

    @property
    def exact(self) -> bool:
        return self.samples == 0

    @classmethod
    def exact_value(cls, value: float) -> "Estimate":
        return cls(mean=value, lo=value, hi=value, samples=0)

    @classmethod
    def from_samples(cls, values: Sequence[float] | np.ndarray) -> "Estimate":
        arr = np.asarray(values, dtype=float)
        if arr.size == 0:
            return cls.exact_value(0.0)
        mean = float(arr.mean())
        if arr.size == 1:
            return cls(mean, mean, mean, 1)
        half = 1.96 * float(arr.std(ddof=1)) / math.sqrt(arr.size)
        return cls(mean, mean - half, mean + half, int(arr.size))

    def scaled(self, factor: float) -> "Estimate":
        lo, hi = sorted((self.lo * factor, self.hi * factor))
        return Estimate(self.mean * factor, lo, hi, self.samples)

    def as_list(self) -> list:
        return [self.mean, self.lo, self.hi]
