"""Pydantic schemas for instance files, mechanisms, run configuration and reports."""

from pandora_delegation.schemas.instance import (
    ConstraintSchema,
    ElementSchema,
    InstanceSchema,
    ModelSchema,
    dump_instance,
    instance_from_schema,
    instance_to_schema,
    load_instance,
    oracle_from_descriptor,
    parse_instance,
)
from pandora_delegation.schemas.mechanism import (
    MechanismSchema,
    dump_mechanism,
    mechanism_from_schema,
    mechanism_to_schema,
    parse_mechanism,
)
from pandora_delegation.schemas.reports import (
    SCHEMA_VERSION,
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

__all__ = [
    "SCHEMA_VERSION",
    "ConstraintSchema", "ElementSchema", "InstanceSchema", "ModelSchema",
    "dump_instance", "instance_from_schema", "instance_to_schema", "load_instance",
    "oracle_from_descriptor", "parse_instance",
    "MechanismSchema", "dump_mechanism", "mechanism_from_schema", "mechanism_to_schema", "parse_mechanism",
    "DelegateReport", "EstimateSchema", "FamilyReport", "GapReportSchema", "GapRowSchema",
    "SelectabilityResult", "SelectabilityRow", "SolveReport", "ValidateReport",
    "gap_csv", "selectability_csv", "to_json",
    "RunConfig",
]
