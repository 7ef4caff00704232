"""Principal–agent interaction simulator.

Per profile: the agent plays (probes, then proposes), the mechanism checks
the proposal, and each side's utility is its accepted value minus its cost
share of the probed elements.  ``exact`` enumerates refined profiles (atoms
split at tag boundaries); otherwise profiles are sampled from the seed in
fixed chunks and a 95% interval is reported.

The DP and sequential agents are solved in expectation directly; their
results are always exact.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple

from pandora_delegation.agents.best_response import best_response_dp, play_strategy
from pandora_delegation.agents.free_agents import favor_principal_free_agent, worst_case_free_agent
from pandora_delegation.agents.index_agent import AgentPlay, weitzman_index_agent
from pandora_delegation.agents.policies import AgentKind, AgentPolicy
from pandora_delegation.agents.sequential import sequential_best_response
from pandora_delegation.config.settings import get_settings
from pandora_delegation.core.acceptance import refine_outcomes
from pandora_delegation.core.model import CostShares, Instance
from pandora_delegation.core.numerics import Estimate
from pandora_delegation.core.profiles import RealizationProfile, check_profile_count, iter_sampled_profiles
from pandora_delegation.errors import BadParameters, TooLarge
from pandora_delegation.mechanisms.mechanism import SingleProposalMechanism, realized_outcomes
from pandora_delegation.solvers.threshold_strategy import threshold_strategy_run

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Trace:
    atoms: Tuple[int, ...]
    probed: Tuple[int, ...]
    proposal: Tuple[int, ...]
    accepted: bool
    principal_utility: float
    agent_utility: float
    weight: float  # probability (exact runs) or 1/N (sampled runs)


@dataclass
class InteractionResult:
    delegated: Estimate       # principal's E[DEL]
    agent: Estimate
    policy: AgentPolicy
    heuristic: bool = False
    traces: List[Trace] = field(default_factory=list)


# ---------------------------------------------------------------------------
# One profile
# ---------------------------------------------------------------------------

def _player(policy: AgentPolicy) -> Callable[[Instance, SingleProposalMechanism, RealizationProfile], AgentPlay]:
    if policy.kind is AgentKind.WEITZMAN_INDEX:
        return lambda inst, mech, prof: weitzman_index_agent(inst, mech, prof, policy.tie_breaking)
    if policy.kind is AgentKind.ADVERSARIAL_MAXIMAL:
        return worst_case_free_agent
    if policy.kind is AgentKind.FAVOR_PRINCIPAL_MAXIMAL:
        return favor_principal_free_agent
    if policy.kind is AgentKind.PRESCRIBED_THRESHOLD:
        def follow(inst: Instance, mech: SingleProposalMechanism, prof: RealizationProfile) -> AgentPlay:
            run = threshold_strategy_run(inst, mech, sorted(mech.whitelist), prof)
            return AgentPlay(run.probed, run.selected)
        return follow
    raise BadParameters(f"agent kind {policy.kind.value} has no per-profile play")


def settle(
    mech: SingleProposalMechanism,
    shares: CostShares,
    profile: RealizationProfile,
    play: AgentPlay,
    weight: float = 1.0,
) -> Trace:
    accepted = mech.accepts(realized_outcomes(profile, play.proposal))
    gain_x = sum(profile.xs[i] for i in play.proposal) if accepted else 0.0
    gain_y = sum(profile.ys[i] for i in play.proposal) if accepted else 0.0
    return Trace(
        atoms=profile.atoms,
        probed=play.probed,
        proposal=tuple(sorted(play.proposal)),
        accepted=accepted,
        principal_utility=gain_x - sum(shares.principal[i] for i in play.probed),
        agent_utility=gain_y - sum(shares.agent[i] for i in play.probed),
        weight=weight,
    )


def _refined_profiles(instance: Instance, mech: SingleProposalMechanism):
    per_element = [refine_outcomes(instance.dist(i), mech.rule_for(i)) for i in range(instance.n)]
    check_profile_count([len(p) for p in per_element])
    for combo in itertools.product(*per_element):
        prob = math.prod(piece.prob for piece in combo)
        if prob == 0.0:
            continue
        yield RealizationProfile.from_atoms(instance, [p.atom for p in combo], [p.tag for p in combo]), prob


# ---------------------------------------------------------------------------
# Expectations
# ---------------------------------------------------------------------------

def _dp_result(instance: Instance, mech: SingleProposalMechanism, policy: AgentPolicy,
               record_traces: bool) -> InteractionResult:
    response = best_response_dp(instance, mech, policy.tie_breaking)
    traces: List[Trace] = []
    if record_traces:
        pieces = response.strategy.pieces
        shares = mech.shares(instance)
        for combo in itertools.product(*(range(len(p)) for p in pieces)):
            prob = math.prod(pieces[i][c].prob for i, c in enumerate(combo))
            probed, proposal = play_strategy(response.strategy, combo)
            traces.append(Trace(
                atoms=tuple(combo),  # agent piece indices
                probed=probed,
                proposal=tuple(sorted(proposal)),
                accepted=True,
                principal_utility=sum(pieces[i][combo[i]].x for i in proposal) - sum(shares.principal[i] for i in probed),
                agent_utility=sum(pieces[i][combo[i]].y for i in proposal) - sum(shares.agent[i] for i in probed),
                weight=prob,
            ))
    return InteractionResult(
        Estimate.exact_value(response.principal_utility),
        Estimate.exact_value(response.agent_utility),
        policy,
        traces=traces,
    )


def simulate_interaction(
    instance: Instance,
    mech: SingleProposalMechanism,
    policy: AgentPolicy,
    exact: Optional[bool] = None,
    samples: Optional[int] = None,
    seed: Optional[int] = None,
    record_traces: bool = False,
) -> InteractionResult:
    """E[DEL] and the agent's expected utility under ``policy``.

    ``exact=None`` enumerates when affordable and samples otherwise.
    """
    if policy.kind is AgentKind.EXACT_DP:
        return _dp_result(instance, mech, policy, record_traces)
    if policy.kind is AgentKind.SEQUENTIAL:
        response = sequential_best_response(instance, mech, policy.tie_breaking)
        return InteractionResult(
            Estimate.exact_value(response.principal_utility), Estimate.exact_value(response.agent_utility), policy
        )

    play = _player(policy)
    shares = mech.shares(instance)
    traces: List[Trace] = []
    heuristic = False

    if exact is not False:
        try:
            principal = agent = 0.0
            for profile, prob in _refined_profiles(instance, mech):
                outcome = play(instance, mech, profile)
                heuristic = heuristic or outcome.heuristic
                trace = settle(mech, shares, profile, outcome, prob)
                principal += prob * trace.principal_utility
                agent += prob * trace.agent_utility
                if record_traces:
                    traces.append(trace)
            return InteractionResult(Estimate.exact_value(principal), Estimate.exact_value(agent), policy, heuristic, traces)
        except TooLarge:
            if exact:
                raise
            traces.clear()
            heuristic = False
            logger.info("simulate_interaction: profile space too large, sampling")

    if seed is None:
        raise BadParameters("a seed is required for a sampled simulation")
    samples = samples or get_settings().mc_samples
    principal_values = []
    agent_values = []
    for profile in iter_sampled_profiles(instance, seed, samples):
        outcome = play(instance, mech, profile)
        heuristic = heuristic or outcome.heuristic
        trace = settle(mech, shares, profile, outcome, 1.0 / samples)
        principal_values.append(trace.principal_utility)
        agent_values.append(trace.agent_utility)
        if record_traces:
            traces.append(trace)
    return InteractionResult(
        Estimate.from_samples(principal_values), Estimate.from_samples(agent_values), policy, heuristic, traces
    )
