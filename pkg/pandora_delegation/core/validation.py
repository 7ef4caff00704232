"""Instance validation: checks run over a leniently loaded instance.

Every check runs even when earlier ones fail, so one call reports every
problem.  The violation strings contain a stable phrase per check
(``participation (principal)``, ``cost division bounds``, ...) that tests
and the CLI can match on.

| Check | What                                                            |
|-------|-----------------------------------------------------------------|
| 1     | element ids are 0..n−1 and the constraint's ground set is n     |
| 2     | each distribution is well formed (p > 0, sums to 1, finite)     |
| 3     | costs are finite and non-negative                               |
| 4     | participation (principal): E[X_i] > c_i                         |
| 5     | participation (agent): E[Y_i] > c_i                             |
| 6     | binary support: exactly {(x_i, y_i), (0, 0)}                    |
| 7     | discount lies in [0, 1]                                         |
| 8     | shared cost: 0 <= c′_i <= c_i, one entry per element, no δ      |
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List

from pandora_delegation.core.model import Instance, ModelKind
from pandora_delegation.core.numerics import approx_equal


# ---------------------------------------------------------------------------
# Result dataclass
# ---------------------------------------------------------------------------

@dataclass
class ValidationReport:
    instance_name: str
    checks_run: int = 0
    checks_passed: int = 0
    violations: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def _record(self, failures: List[str]) -> None:
        self.checks_run += 1
        if failures:
            self.violations.extend(failures)
        else:
            self.checks_passed += 1


def _not_above(mean: float, cost: float) -> bool:
    return mean <= cost or approx_equal(mean, cost)


# ---------------------------------------------------------------------------
# Main validation function
# ---------------------------------------------------------------------------

def validate_instance(instance: Instance) -> ValidationReport:
    report = ValidationReport(instance_name=instance.name or "<unnamed>")
    model = instance.model
    n = instance.n

    # Check 1: ids and ground set
    failures = [f"element at position {pos}: id {e.id} != {pos}" for pos, e in enumerate(instance.elements) if e.id != pos]
    if instance.constraint.n != n:
        failures.append(f"ground set: constraint covers {instance.constraint.n} elements, instance has {n}")
    report._record(failures)

    # Check 2: distributions
    failures = []
    for e in instance.elements:
        failures.extend(f"element {e.id}: distribution {msg}" for msg in e.dist.issues())
    report._record(failures)
    dists_ok = not failures

    # Check 3: costs
    report._record([
        f"element {e.id}: cost {e.cost!r} must be finite and non-negative"
        for e in instance.elements
        if not math.isfinite(e.cost) or e.cost < 0
    ])

    # Checks 4-5: participation (only meaningful on well-formed distributions)
    if dists_ok:
        report._record([
            f"element {e.id}: participation (principal) E[X]={e.dist.mean_x():.6g} <= c={e.cost:.6g}"
            for e in instance.elements
            if _not_above(e.dist.mean_x(), e.cost)
        ])
        report._record([
            f"element {e.id}: participation (agent) E[Y]={e.dist.mean_y():.6g} <= c={e.cost:.6g}"
            for e in instance.elements
            if _not_above(e.dist.mean_y(), e.cost)
        ])

    # Check 6: binary support
    if model.kind is ModelKind.BINARY:
        failures = []
        for e in instance.elements:
            atoms = e.dist.atoms
            zero = [a for a in atoms if a.x == 0 and a.y == 0]
            other = [a for a in atoms if not (a.x == 0 and a.y == 0)]
            if len(atoms) != 2 or len(zero) != 1 or len(other) != 1 or other[0].x <= 0 or other[0].y <= 0:
                failures.append(f"element {e.id}: binary support must be exactly {{(x, y), (0, 0)}} with x, y > 0")
        report._record(failures)

    # Check 7: discount
    report._record(
        [] if 0.0 <= model.discount <= 1.0 else [f"discount {model.discount!r} outside [0, 1]"]
    )

    # Check 8: shared cost
    failures = []
    if model.kind is ModelKind.SHARED_COST:
        if model.discount != 0.0:
            failures.append("shared cost: a discount is not allowed in the shared-cost model")
        division = model.cost_division
        if division is not None:
            if len(division) != n:
                failures.append(f"cost division bounds: {len(division)} entries for {n} elements")
            else:
                failures.extend(
                    f"element {e.id}: cost division bounds c'={share!r} outside [0, {e.cost!r}]"
                    for e, share in zip(instance.elements, division)
                    if share < 0 or (share > e.cost and not approx_equal(share, e.cost))
                )
    elif model.cost_division is not None:
        failures.append(f"cost division bounds: a cost division is only valid for shared_cost, not {model.kind.value}")
    report._record(failures)

    return report
