"""Validated CLI run configuration (echoed into every report)."""

from __future__ import annotations

from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, Field, model_validator

from pandora_delegation.agents.policies import AgentKind, TieBreaking

Command = Literal["solve", "delegate", "gap", "selectability", "family", "validate"]


class RunConfig(BaseModel):
    command: Command
    instance: Optional[str] = None
    family: Optional[str] = None
    params: Dict[str, Any] = Field(default_factory=dict)
    n_values: List[int] = Field(default_factory=list)
    samples: Optional[int] = Field(None, ge=1)
    seed: Optional[int] = None
    tolerance: float = Field(1e-9, gt=0)
    exact: bool = False
    agent: AgentKind = AgentKind.EXACT_DP
    tie: TieBreaking = TieBreaking.FAVOR_PRINCIPAL
    format: Literal["json", "csv"] = "json"
    jobs: int = Field(1, ge=1)
    timings: bool = False

    @model_validator(mode="after")
    def _seed_for_sampling(self) -> "RunConfig":
        if self.samples is not None and self.seed is None:
            raise ValueError("--seed is required whenever --samples is given")
        if self.exact and self.samples is not None:
            raise ValueError("--exact and --samples are mutually exclusive")
        return self

    def echo(self) -> Dict[str, Any]:
        return self.model_dump(mode="json")
