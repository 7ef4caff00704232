"""Command-line front end.

    python -m pandora_delegation solve --instance data/instances/two_boxes.json
    python -m pandora_delegation delegate --family shared_cost_half --n 2
    python -m pandora_delegation gap --family standard_gap --n 4,9,16 --seed 7 --format csv
    python -m pandora_delegation selectability --instance data/instances/partition_small.json
    python -m pandora_delegation family --family free_agent_gap --n 16
    python -m pandora_delegation validate data/instances/bad.json

Exit codes: 0 success, 1 usage error, 2 invalid input or failed validation,
3 an exact computation exceeded its guard.  Reports go to stdout (or
``--out``), logs to stderr.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

from pydantic import ValidationError

from pandora_delegation import __version__
from pandora_delegation.agents.policies import AgentKind, AgentPolicy, TieBreaking
from pandora_delegation.agents.simulator import simulate_interaction
from pandora_delegation.config.logging_config import configure_logging, get_logger
from pandora_delegation.config.settings import get_settings, reload_settings
from pandora_delegation.constraints.oracles import ConstraintKind, unwrap
from pandora_delegation.core.model import Instance, ModelKind, compute_caps
from pandora_delegation.core.numerics import Estimate
from pandora_delegation.core.validation import validate_instance
from pandora_delegation.errors import BadParameters, PandoraError, TooLarge
from pandora_delegation.harness.families import FamilySpec, generate_family, parse_family
from pandora_delegation.harness.gap import best_ocrs_member, gap_sweep, ratio_interval
from pandora_delegation.mechanisms.builders import (
    accept_all_mechanism,
    build_binary_matroid,
    build_free_agent_kuniform,
    build_free_agent_ocrs,
    build_shared_cost,
)
from pandora_delegation.mechanisms.mechanism import SingleProposalMechanism
from pandora_delegation.ocrs.ex_ante import ExAnteVector, ex_ante_membership
from pandora_delegation.ocrs.greedy import KNAPSACK_ALPHA, MATROID_ALPHA, build_greedy_ocrs
from pandora_delegation.ocrs.selectability import estimate_selectability
from pandora_delegation.schemas.instance import instance_to_schema, load_instance
from pandora_delegation.schemas.mechanism import mechanism_to_schema
from pandora_delegation.schemas.reports import (
    DelegateReport,
    EstimateSchema,
    FamilyReport,
    GapReportSchema,
    GapRowSchema,
    SelectabilityResult,
    SelectabilityRow,
    SolveReport,
    ValidateReport,
    gap_csv,
    selectability_csv,
    to_json,
)
from pandora_delegation.schemas.run_config import RunConfig
from pandora_delegation.solvers.surrogate import exact_opt_value, opt_benchmark, opt_surrogate
from pandora_delegation.solvers.weitzman import expected_weitzman_utility

logger = logging.getLogger(__name__)
log = get_logger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INVALID = 2
EXIT_TOO_LARGE = 3

MECHANISMS = ("auto", "binary", "free_agent_kuniform", "free_agent_ocrs", "shared_cost", "accept_all")


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with status 1."""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


class CommandFailed(Exception):
    def __init__(self, code: int, text: str = "") -> None:
        super().__init__(text)
        self.code = code
        self.text = text


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def _common() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--samples", type=int, default=None)
    common.add_argument("--exact", action="store_true", help="fail with exit 3 instead of sampling")
    common.add_argument("--tolerance", type=float, default=None)
    common.add_argument("--format", choices=["json", "csv"], default="json")
    common.add_argument("--out", type=Path, default=None)
    common.add_argument("--jobs", type=int, default=1)
    common.add_argument("--timings", action="store_true", help="add wall-clock columns (breaks byte identity)")
    common.add_argument("--log-level", default=None)
    common.add_argument("--log-json", action="store_true")
    return common


def _source(parser: argparse.ArgumentParser, n_many: bool = False) -> None:
    group = parser.add_mutually_exclusive_group(required=True)
    group.add_argument("--instance", type=Path)
    group.add_argument("--family")
    parser.add_argument("--n", dest="n_values", default=None, help="comma-separated" if n_many else None)
    parser.add_argument("--params", nargs="*", default=[], metavar="K=V")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pandora_delegation", description="Delegated Pandora's box simulator")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    common = _common()

    solve = sub.add_parser("solve", parents=[common], help="non-delegated optimum and benchmarks")
    _source(solve)

    delegate = sub.add_parser("delegate", parents=[common], help="build a mechanism and simulate the agent")
    _source(delegate)
    delegate.add_argument("--mechanism", choices=MECHANISMS, default="auto")
    delegate.add_argument("--delta", type=float, default=0.5, help="free_agent_kuniform acceptance level")
    delegate.add_argument("--member", type=int, default=None, help="OCRS member (default: best)")
    delegate.add_argument("--agent", choices=[k.value for k in AgentKind], default=None)
    delegate.add_argument("--tie", choices=[t.value for t in TieBreaking], default=TieBreaking.FAVOR_PRINCIPAL.value)

    gap = sub.add_parser("gap", parents=[common], help="delegation-gap sweep over n")
    gap.add_argument("--family", required=True)
    gap.add_argument("--n", dest="n_values", required=True, help="comma-separated")
    gap.add_argument("--params", nargs="*", default=[], metavar="K=V")
    gap.add_argument("--evaluate", choices=["auto", "brute_force", "constructor"], default="auto")
    gap.add_argument("--tie", choices=[t.value for t in TieBreaking], default=TieBreaking.FAVOR_PRINCIPAL.value)

    sel = sub.add_parser("selectability", parents=[common], help="greedy OCRS selectability per element")
    _source(sel)
    sel.add_argument("--p", default=None, help="comma-separated ex-ante vector")
    sel.add_argument("--mode", choices=["exhaustive", "sampled"], default="exhaustive")

    fam = sub.add_parser("family", parents=[common], help="dump a generated family instance")
    fam.add_argument("--family", required=True)
    fam.add_argument("--n", dest="n_values", required=True)
    fam.add_argument("--params", nargs="*", default=[], metavar="K=V")

    val = sub.add_parser("validate", parents=[common], help="check an instance file")
    val.add_argument("path", type=Path)
    return parser


# ---------------------------------------------------------------------------
# Argument helpers
# ---------------------------------------------------------------------------

def _scalar(raw: str) -> Any:
    lowered = raw.lower()
    if lowered in ("true", "false"):
        return lowered == "true"
    for cast in (int, float):
        try:
            return cast(raw)
        except ValueError:
            continue
    return raw


def parse_params(items: Sequence[str]) -> Dict[str, Any]:
    params: Dict[str, Any] = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise BadParameters(f"--params expects K=V, got {item!r}")
        params[key] = _scalar(value)
    return params


def parse_n_values(raw: Optional[str]) -> List[int]:
    if not raw:
        return []
    try:
        return [int(v) for v in raw.split(",") if v.strip()]
    except ValueError as exc:
        raise BadParameters(f"--n expects comma-separated integers, got {raw!r}") from exc


def _floats(raw: str) -> List[float]:
    try:
        return [float(v) for v in raw.split(",") if v.strip()]
    except ValueError as exc:
        raise BadParameters(f"expected comma-separated numbers, got {raw!r}") from exc


def family_spec(name: str, n: int, params: Dict[str, Any], seed: Optional[int]) -> FamilySpec:
    params = dict(params)
    eps = params.pop("eps", None)
    sentinel = params.pop("sentinel", None)
    check = params.pop("check_ranges", True)
    return FamilySpec(
        family=parse_family(name),
        n=n,
        eps=None if eps is None else float(eps),
        sentinel=None if sentinel is None else float(sentinel),
        seed=seed,
        params=params,
        check_ranges=bool(check),
    )


def _run_config(args: argparse.Namespace) -> RunConfig:
    try:
        return RunConfig(
            command=args.command,
            instance=str(getattr(args, "instance", None) or getattr(args, "path", None) or "") or None,
            family=getattr(args, "family", None),
            params=parse_params(getattr(args, "params", [])),
            n_values=parse_n_values(getattr(args, "n_values", None)),
            samples=args.samples,
            seed=args.seed,
            tolerance=get_settings().tolerance,
            exact=args.exact,
            agent=getattr(args, "agent", None) or AgentKind.EXACT_DP.value,
            tie=getattr(args, "tie", TieBreaking.FAVOR_PRINCIPAL.value),
            format=args.format,
            jobs=args.jobs,
            timings=args.timings,
        )
    except ValidationError as exc:
        raise BadParameters("; ".join(err["msg"] for err in exc.errors())) from exc


def _instance(config: RunConfig, path: Optional[Path] = None) -> Instance:
    if path is not None:
        return load_instance(path, strict=True)
    if config.family is None:
        raise BadParameters("an --instance or --family is required")
    if len(config.n_values) != 1:
        raise BadParameters("--n takes exactly one value here")
    return generate_family(family_spec(config.family, config.n_values[0], config.params, config.seed))


def _exact_flag(config: RunConfig) -> Optional[bool]:
    return True if config.exact else (False if config.samples is not None else None)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def _opt(instance: Instance, config: RunConfig) -> Tuple[Estimate, str]:
    if config.exact:
        return Estimate.exact_value(exact_opt_value(instance)), "exact"
    if config.samples is not None:
        return opt_surrogate(instance, samples=config.samples, seed=config.seed, exact=False), "surrogate"
    estimate = opt_benchmark(instance, seed=config.seed, samples=config.samples)
    return estimate, "exact" if estimate.exact else "surrogate"


def cmd_solve(args: argparse.Namespace, config: RunConfig) -> Tuple[int, str]:
    instance = _instance(config, args.instance)
    caps = compute_caps(instance)
    opt, method = _opt(instance, config)
    weitzman = None
    if instance.constraint.is_matroid:
        try:
            weitzman = expected_weitzman_utility(instance)
        except TooLarge:
            logger.warning("solve: Weitzman expectation skipped, profile space too large")
    try:
        surrogate = EstimateSchema.of(
            opt_surrogate(instance, samples=config.samples, seed=config.seed, exact=_exact_flag(config))
        )
    except BadParameters:
        surrogate = None
    report = SolveReport(
        config=config.echo(),
        seed=config.seed,
        instance=instance.name or str(args.instance or config.family),
        n=instance.n,
        constraint=instance.constraint.kind.value,
        caps_x=list(caps.tau_x),
        caps_y=list(caps.tau_y),
        e_opt=EstimateSchema.of(opt),
        method=method,
        weitzman=weitzman,
        surrogate=surrogate,
    )
    return EXIT_OK, to_json(report)


_DEFAULT_AGENT = {
    "binary": AgentKind.WEITZMAN_INDEX,
    "free_agent_kuniform": AgentKind.ADVERSARIAL_MAXIMAL,
    "free_agent_ocrs": AgentKind.ADVERSARIAL_MAXIMAL,
    "shared_cost": AgentKind.EXACT_DP,
    "accept_all": AgentKind.EXACT_DP,
}


def _ocrs_alpha(instance: Instance) -> float:
    base, _ = unwrap(instance.constraint)
    return KNAPSACK_ALPHA if base.kind is ConstraintKind.KNAPSACK else MATROID_ALPHA


def _resolve_mechanism(instance: Instance, choice: str) -> str:
    if choice != "auto":
        return choice
    return {
        ModelKind.BINARY: "binary",
        ModelKind.FREE_AGENT: "free_agent_ocrs",
        ModelKind.SHARED_COST: "shared_cost",
    }.get(instance.model.kind, "accept_all")


def cmd_delegate(args: argparse.Namespace, config: RunConfig) -> Tuple[int, str]:
    instance = _instance(config, args.instance)
    choice = _resolve_mechanism(instance, args.mechanism)
    agent_kind = AgentKind(args.agent) if args.agent else _DEFAULT_AGENT[choice]
    policy = AgentPolicy(agent_kind, TieBreaking(args.tie))
    exact = _exact_flag(config)

    guarantee: Optional[float] = None
    mech: SingleProposalMechanism
    if choice == "binary":
        mech = build_binary_matroid(instance, seed=config.seed)
        guarantee = 0.25
    elif choice == "free_agent_kuniform":
        mech = build_free_agent_kuniform(instance, args.delta)
        guarantee = args.delta
    elif choice == "free_agent_ocrs":
        p = ex_ante_membership(instance, samples=config.samples, seed=config.seed, exact=exact)
        family = build_greedy_ocrs(instance, p)
        if args.member is None:
            mech, _ = best_ocrs_member(instance, p, family, policy, seed=config.seed, samples=config.samples)
        else:
            mech = build_free_agent_ocrs(instance, p, family, member=args.member, seed=config.seed)
        guarantee = family.nominal_alpha
    elif choice == "shared_cost":
        mech = build_shared_cost(instance, member=args.member or 0, seed=config.seed)
        guarantee = _ocrs_alpha(instance) / 2
    else:
        mech = accept_all_mechanism(instance)

    result = simulate_interaction(instance, mech, policy, exact=exact, samples=config.samples, seed=config.seed)
    opt, _ = _opt(instance, config)
    ratio, lo, hi = ratio_interval(result.delegated, opt)
    report = DelegateReport(
        config=config.echo(),
        seed=config.seed,
        instance=instance.name or str(args.instance or config.family),
        mechanism=mechanism_to_schema(mech),
        agent=policy.kind.value,
        tie=policy.tie_breaking.value,
        e_opt=EstimateSchema.of(opt),
        e_del=EstimateSchema.of(result.delegated),
        agent_utility=EstimateSchema.of(result.agent),
        ratio=ratio,
        ratio_lo=lo,
        ratio_hi=hi,
        guarantee=guarantee,
        heuristic=result.heuristic,
    )
    return EXIT_OK, to_json(report)


def cmd_gap(args: argparse.Namespace, config: RunConfig) -> Tuple[int, str]:
    if config.seed is None:
        raise BadParameters("gap needs --seed")
    gap_report = gap_sweep(
        parse_family(args.family),
        config.n_values,
        seed=config.seed,
        jobs=config.jobs,
        params=config.params,
        evaluate=args.evaluate,
        tie_breaking=TieBreaking(args.tie),
        samples=config.samples,
    )
    rows = [
        GapRowSchema(**{**r.as_dict(), "wall_ms": r.wall_ms if config.timings else None})
        for r in gap_report.rows
    ]
    if config.format == "csv":
        return EXIT_OK, gap_csv(rows, timings=config.timings)
    report = GapReportSchema(
        config=config.echo(),
        seed=config.seed,
        family=gap_report.family,
        evaluate=gap_report.evaluate,
        slope=gap_report.slope,
        rows=rows,
    )
    return EXIT_OK, to_json(report)


def cmd_selectability(args: argparse.Namespace, config: RunConfig) -> Tuple[int, str]:
    instance = _instance(config, args.instance)
    if args.p is not None:
        values = _floats(args.p)
        if len(values) != instance.n:
            raise BadParameters(f"--p needs {instance.n} entries, got {len(values)}")
        p = ExAnteVector(tuple(values), "given")
    else:
        p = ex_ante_membership(instance, samples=config.samples, seed=config.seed, exact=_exact_flag(config))
    family = build_greedy_ocrs(instance, p)
    estimate = estimate_selectability(family, mode=args.mode, samples=config.samples, seed=config.seed)
    rows = [SelectabilityRow(**row) for row in estimate.rows()]
    if config.format == "csv":
        return EXIT_OK, selectability_csv(rows)
    report = SelectabilityResult(
        config=config.echo(),
        seed=config.seed,
        instance=instance.name or str(args.instance or config.family),
        kind=family.kind,
        nominal_alpha=family.nominal_alpha,
        ex_ante=list(p.p),
        minimum=estimate.minimum(sorted(family.whitelist)),
        heuristic=estimate.heuristic,
        rows=rows,
    )
    return EXIT_OK, to_json(report)


def cmd_family(args: argparse.Namespace, config: RunConfig) -> Tuple[int, str]:
    instance = _instance(config)
    report = FamilyReport(
        config=config.echo(),
        seed=config.seed,
        family=config.family or "",
        n=instance.n,
        params=config.params,
        valid=validate_instance(instance).ok,
        instance=instance_to_schema(instance),
    )
    return EXIT_OK, to_json(report)


def cmd_validate(args: argparse.Namespace, config: RunConfig) -> Tuple[int, str]:
    instance = load_instance(args.path, strict=False)
    result = validate_instance(instance)
    report = ValidateReport(
        config=config.echo(),
        seed=config.seed,
        instance=result.instance_name,
        ok=result.ok,
        checks_run=result.checks_run,
        checks_passed=result.checks_passed,
        violations=result.violations,
    )
    return (EXIT_OK if result.ok else EXIT_INVALID), to_json(report)


COMMANDS = {
    "solve": cmd_solve,
    "delegate": cmd_delegate,
    "gap": cmd_gap,
    "selectability": cmd_selectability,
    "family": cmd_family,
    "validate": cmd_validate,
}


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def _emit(text: str, out: Optional[Path]) -> None:
    if out is None:
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        out.write_text(text, encoding="utf-8")


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    if args.tolerance is not None:
        if args.tolerance <= 0:
            sys.stderr.write("error: --tolerance must be positive\n")
            return EXIT_USAGE
        os.environ["PANDORA_TOLERANCE"] = repr(args.tolerance)
    try:
        reload_settings()
    except PandoraError as exc:
        sys.stderr.write(f"error: {exc.message}\n")
        return EXIT_INVALID
    configure_logging(args.log_level, args.log_json or None)

    try:
        config = _run_config(args)
        log.info("command_start", command=args.command, seed=config.seed, jobs=config.jobs)
        code, text = COMMANDS[args.command](args, config)
    except TooLarge as exc:
        sys.stderr.write(f"error [{exc.code}]: {exc.message}\n")
        return EXIT_TOO_LARGE
    except PandoraError as exc:
        sys.stderr.write(f"error [{exc.code}]: {exc.message}\n")
        return EXIT_INVALID

    _emit(text, args.out)
    log.info("command_done", command=args.command, exit=code)
    return code


if __name__ == "__main__":
    sys.exit(main())
