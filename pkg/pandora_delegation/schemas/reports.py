"""Report models and their JSON/CSV writers.

Every report carries ``schema_version``, the run configuration echo and
the seed.  JSON is written with sorted keys, CSV with a fixed column
order; floats use ``repr`` in both, so seeded runs are byte-identical.
"""

from __future__ import annotations

import csv
import io
import json
from typing import Any, Dict, List, Optional, Sequence

from pydantic import BaseModel, Field

from pandora_delegation.core.numerics import Estimate
from pandora_delegation.schemas.instance import InstanceSchema
from pandora_delegation.schemas.mechanism import MechanismSchema

SCHEMA_VERSION = "1.0"

GAP_COLUMNS = ["family", "n", "e_opt", "e_del", "ratio", "ci_lo", "ci_hi", "seed"]
SELECTABILITY_COLUMNS = ["element_id", "estimate", "mode", "samples", "seed"]


class EstimateSchema(BaseModel):
    mean: float
    lo: float
    hi: float
    samples: int = 0

    @classmethod
    def of(cls, estimate: Estimate) -> "EstimateSchema":
        return cls(mean=estimate.mean, lo=estimate.lo, hi=estimate.hi, samples=estimate.samples)


class ReportBase(BaseModel):
    schema_version: str = SCHEMA_VERSION
    command: str
    config: Dict[str, Any] = Field(default_factory=dict)
    seed: Optional[int] = None


class SolveReport(ReportBase):
    command: str = "solve"
    instance: str
    n: int
    constraint: str
    caps_x: List[float]
    caps_y: List[float]
    e_opt: EstimateSchema
    method: str
    weitzman: Optional[float] = None
    surrogate: Optional[EstimateSchema] = None


class DelegateReport(ReportBase):
    command: str = "delegate"
    instance: str
    mechanism: MechanismSchema
    agent: str
    tie: str
    e_opt: EstimateSchema
    e_del: EstimateSchema
    agent_utility: EstimateSchema
    ratio: float
    ratio_lo: float
    ratio_hi: float
    guarantee: Optional[float] = None
    heuristic: bool = False


class ValidateReport(ReportBase):
    command: str = "validate"
    instance: str
    ok: bool
    checks_run: int
    checks_passed: int
    violations: List[str] = Field(default_factory=list)


class FamilyReport(ReportBase):
    command: str = "family"
    family: str
    n: int
    params: Dict[str, Any] = Field(default_factory=dict)
    valid: bool
    instance: InstanceSchema


class SelectabilityRow(BaseModel):
    element_id: int
    estimate: float
    mode: str
    samples: int
    seed: Optional[int] = None


class SelectabilityResult(ReportBase):
    command: str = "selectability"
    instance: str
    kind: str
    nominal_alpha: float
    ex_ante: List[float]
    minimum: float
    heuristic: bool = False
    rows: List[SelectabilityRow] = Field(default_factory=list)


class GapRowSchema(BaseModel):
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
    wall_ms: Optional[float] = None


class GapReportSchema(ReportBase):
    command: str = "gap"
    family: str
    evaluate: str
    slope: Optional[float] = None
    rows: List[GapRowSchema] = Field(default_factory=list)


# ---------------------------------------------------------------------------
# Writers
# ---------------------------------------------------------------------------

def to_json(report: BaseModel) -> str:
    return json.dumps(report.model_dump(mode="json"), sort_keys=True, indent=2) + "\n"


def _cell(value: Any) -> str:
    if isinstance(value, float):
        return repr(value)
    return "" if value is None else str(value)


def rows_to_csv(rows: Sequence[Dict[str, Any]], columns: Sequence[str]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(row.get(col)) for col in columns])
    return buffer.getvalue()


def gap_csv(rows: Sequence[GapRowSchema], timings: bool = False) -> str:
    columns = GAP_COLUMNS + (["wall_ms"] if timings else [])
    return rows_to_csv([r.model_dump() for r in rows], columns)


def selectability_csv(rows: Sequence[SelectabilityRow]) -> str:
    return rows_to_csv([r.model_dump() for r in rows], SELECTABILITY_COLUMNS)
