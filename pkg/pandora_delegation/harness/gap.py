"""Delegation-gap sweeps.

For every n a family instance is generated, E[OPT] is computed (exactly
where possible, otherwise the seeded surrogate) and the delegated value is
found in one of two ways:

* ``brute_force``: the best 1-uniform mechanism found by
  ``brute_force_optimal_mechanism`` (impossibility families);
* ``constructor``: the mechanism the utility model's constructor builds,
  evaluated against the model's agent (binary: index agent; free agent:
  adversarial free agent on the best OCRS member; shared cost: exact best
  response).

Rows are computed independently per n (in a process pool when ``jobs > 1``)
and merged sorted by n, so a report never depends on the worker count.
"""

from __future__ import annotations

import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from pandora_delegation.agents.policies import AgentKind, AgentPolicy, TieBreaking
from pandora_delegation.agents.simulator import InteractionResult, simulate_interaction
from pandora_delegation.core.model import Instance, ModelKind
from pandora_delegation.core.numerics import Estimate
from pandora_delegation.errors import BadParameters
from pandora_delegation.harness.brute_force import brute_force_optimal_mechanism
from pandora_delegation.harness.families import FamilyId, FamilySpec, generate_family, share_dependent
from pandora_delegation.mechanisms.builders import (
    build_binary_matroid,
    build_free_agent_ocrs,
    build_shared_cost,
)
from pandora_delegation.mechanisms.mechanism import SingleProposalMechanism
from pandora_delegation.ocrs.ex_ante import ExAnteVector, ex_ante_membership
from pandora_delegation.ocrs.greedy import GreedyFamily, build_greedy_ocrs
from pandora_delegation.solvers.surrogate import opt_benchmark

logger = logging.getLogger(__name__)

GAP_FAMILIES = frozenset({
    FamilyId.STANDARD_GAP,
    FamilyId.FREE_AGENT_GAP,
    FamilyId.DISCOUNTED_GAP,
    FamilyId.SHARED_COST_HALF,
    FamilyId.AGENT_AGNOSTIC_GAP,
})


@dataclass(frozen=True)
class GapRow:
    family: str
    n: int
    e_opt: float
    e_del: float
    ratio: float
    ci_lo: float
    ci_hi: float
    seed: int
    search: str
    evaluator: str
    candidates: int = 0
    wall_ms: float = 0.0

    def as_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class GapReport:
    family: str
    seed: int
    evaluate: str
    params: Dict[str, Any] = field(default_factory=dict)
    rows: List[GapRow] = field(default_factory=list)
    slope: Optional[float] = None


# ---------------------------------------------------------------------------
# Ratios
# ---------------------------------------------------------------------------

def ratio_interval(delegated: Estimate, opt: Estimate) -> Tuple[float, float, float]:
    """(ratio, lo, hi); interval bounds divide the opposite ends of the two intervals."""
    if opt.mean <= 0:
        raise BadParameters(f"E[OPT] must be positive to form a ratio, got {opt.mean!r}")
    ratio = delegated.mean / opt.mean
    if delegated.exact and opt.exact:
        return ratio, ratio, ratio
    lo = delegated.lo / opt.hi if opt.hi > 0 else -math.inf
    hi = delegated.hi / opt.lo if opt.lo > 0 else math.inf
    return ratio, min(lo, ratio), max(hi, ratio)


def fit_log_slope(rows: Sequence[GapRow]) -> float:
    """Least-squares slope of log(ratio) against log(n)."""
    if len(rows) < 2:
        raise BadParameters("a slope needs at least two rows")
    if any(r.ratio <= 0 for r in rows):
        raise BadParameters("log-log slope needs positive ratios")
    log_n = np.log([float(r.n) for r in rows])
    log_ratio = np.log([r.ratio for r in rows])
    slope, _ = np.polyfit(log_n, log_ratio, 1)
    return float(slope)


# ---------------------------------------------------------------------------
# Constructor evaluation
# ---------------------------------------------------------------------------

def best_ocrs_member(
    instance: Instance,
    p: Optional[ExAnteVector] = None,
    family: Optional[GreedyFamily] = None,
    policy: Optional[AgentPolicy] = None,
    seed: Optional[int] = None,
    samples: Optional[int] = None,
) -> Tuple[SingleProposalMechanism, InteractionResult]:
    """Build every deterministic member of the free-agent OCRS family and keep the best for the principal."""
    policy = policy or AgentPolicy(AgentKind.ADVERSARIAL_MAXIMAL)
    p = p or ex_ante_membership(instance, seed=seed)
    family = family or build_greedy_ocrs(instance, p)
    best: Optional[Tuple[SingleProposalMechanism, InteractionResult]] = None
    for member in range(len(family.members)):
        mech = build_free_agent_ocrs(instance, p, family, member=member, seed=seed)
        result = simulate_interaction(instance, mech, policy, samples=samples, seed=seed)
        logger.debug("best_ocrs_member: member=%s E[DEL]=%s", family.members[member].label, result.delegated.mean)
        if best is None or result.delegated.mean > best[1].delegated.mean:
            best = (mech, result)
    assert best is not None
    return best


def constructor_delegation(
    instance: Instance, seed: int, samples: Optional[int] = None
) -> Tuple[Estimate, str]:
    """E[DEL] of the model's constructor against the model's agent."""
    kind = instance.model.kind
    if kind is ModelKind.BINARY:
        mech = build_binary_matroid(instance, seed=seed)
        result = simulate_interaction(instance, mech, AgentPolicy(AgentKind.WEITZMAN_INDEX), samples=samples, seed=seed)
        return result.delegated, "index"
    if kind is ModelKind.FREE_AGENT:
        _, result = best_ocrs_member(instance, seed=seed, samples=samples)
        return result.delegated, "adversarial"
    if kind is ModelKind.SHARED_COST:
        mech = build_shared_cost(instance, seed=seed)
        result = simulate_interaction(instance, mech, AgentPolicy(AgentKind.EXACT_DP), seed=seed)
        return result.delegated, "dp"
    raise BadParameters(f"no mechanism constructor for the {kind.value} model; use brute force")


# ---------------------------------------------------------------------------
# Sweep
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class _Task:
    family: FamilyId
    n: int
    seed: int
    evaluate: str
    params: Dict[str, Any]
    tie_breaking: TieBreaking
    samples: Optional[int]


def _family_spec(task: _Task) -> FamilySpec:
    params = dict(task.params)
    eps = params.pop("eps", None)
    sentinel = params.pop("sentinel", None)
    return FamilySpec(
        family=task.family,
        n=task.n,
        eps=None if eps is None else float(eps),
        sentinel=None if sentinel is None else float(sentinel),
        seed=task.seed,
        params=params,
    )


def _gap_row(task: _Task) -> GapRow:
    started = time.perf_counter()
    spec = _family_spec(task)
    instance = generate_family(spec)
    opt = opt_benchmark(instance, seed=task.seed, samples=task.samples)

    if task.evaluate == "brute_force":
        found = brute_force_optimal_mechanism(
            instance,
            tie_breaking=task.tie_breaking,
            instance_factory=share_dependent(spec),
        )
        delegated = Estimate.exact_value(found.delegated)
        search, evaluator, candidates = found.search, found.evaluator, found.candidates
    else:
        delegated, evaluator = constructor_delegation(instance, task.seed, task.samples)
        search, candidates = "constructor", 1

    ratio, lo, hi = ratio_interval(delegated, opt)
    return GapRow(
        family=task.family.value,
        n=task.n,
        e_opt=opt.mean,
        e_del=delegated.mean,
        ratio=ratio,
        ci_lo=lo,
        ci_hi=hi,
        seed=task.seed,
        search=search,
        evaluator=evaluator,
        candidates=candidates,
        wall_ms=1000 * (time.perf_counter() - started),
    )


def gap_sweep(
    family: FamilyId,
    n_values: Sequence[int],
    seed: int,
    jobs: int = 1,
    params: Optional[Dict[str, Any]] = None,
    evaluate: str = "auto",
    tie_breaking: TieBreaking = TieBreaking.FAVOR_PRINCIPAL,
    samples: Optional[int] = None,
) -> GapReport:
    family = FamilyId(family)
    if not n_values:
        raise BadParameters("gap_sweep needs at least one n")
    if jobs < 1:
        raise BadParameters(f"jobs must be >= 1, got {jobs}")
    if evaluate == "auto":
        evaluate = "brute_force" if family in GAP_FAMILIES else "constructor"
    if evaluate not in ("brute_force", "constructor"):
        raise BadParameters(f"evaluate must be auto, brute_force or constructor, got {evaluate!r}")

    params = dict(params or {})
    tasks = [
        _Task(family, int(n), int(seed), evaluate, params, tie_breaking, samples)
        for n in sorted(set(int(v) for v in n_values))
    ]
    started = time.perf_counter()
    logger.info("gap_sweep: START family=%s n=%s jobs=%d evaluate=%s",
                family.value, [t.n for t in tasks], jobs, evaluate)

    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=min(jobs, len(tasks))) as pool:
            rows = list(pool.map(_gap_row, tasks))
    else:
        rows = [_gap_row(t) for t in tasks]
    rows.sort(key=lambda r: r.n)

    report = GapReport(family=family.value, seed=int(seed), evaluate=evaluate, params=params, rows=rows)
    if len(rows) >= 2 and all(r.ratio > 0 for r in rows):
        report.slope = fit_log_slope(rows)
    logger.info("gap_sweep: DONE family=%s rows=%d slope=%s wall_ms=%.1f",
                family.value, len(rows), report.slope, 1000 * (time.perf_counter() - started))
    return report
