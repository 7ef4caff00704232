"""Pydantic schemas for instance files.

    {
      "name": "two_boxes",
      "model": {"kind": "standard", "discount": 0.0, "cost_division": null},
      "constraint": {"kind": "k_uniform", "k": 1},
      "elements": [{"id": 0, "cost": 0.5, "atoms": [[4.0, 1.0, 0.25], [0.0, 0.0, 0.75]]}, ...]
    }

Constraint ``n`` defaults to the number of elements.  Loading is lenient by
default: malformed distributions are kept so ``validate`` can list every
problem; ``strict=True`` rejects them.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Annotated, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, Field, TypeAdapter, ValidationError

from pandora_delegation.constraints.oracles import (
    BipartiteMatching,
    ConstraintOracle,
    Knapsack,
    KUniform,
    PartitionMatroid,
    RestrictedOracle,
    graphic_matroid,
)
from pandora_delegation.core.model import Element, Instance, ModelKind, UtilityModel, build_instance
from pandora_delegation.errors import InstanceLoadError, PandoraError

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Constraints
# ---------------------------------------------------------------------------

class KUniformSchema(BaseModel):
    kind: Literal["k_uniform"] = "k_uniform"
    n: Optional[int] = None
    k: int = Field(..., ge=0)


class PartitionSchema(BaseModel):
    kind: Literal["partition"] = "partition"
    n: Optional[int] = None
    blocks: List[List[int]]
    caps: List[int]


class KnapsackSchema(BaseModel):
    kind: Literal["knapsack"] = "knapsack"
    n: Optional[int] = None
    sizes: List[float]
    budget: float


class MatchingSchema(BaseModel):
    kind: Literal["matching"] = "matching"
    n: Optional[int] = None
    edges: List[Tuple[int, int]]


class GraphicSchema(BaseModel):
    kind: Literal["graphic"] = "graphic"
    n: Optional[int] = None
    edges: List[Tuple[int, int]]


ConstraintSchema = Annotated[
    Union[KUniformSchema, PartitionSchema, KnapsackSchema, MatchingSchema, GraphicSchema],
    Field(discriminator="kind"),
]

_CONSTRAINT_ADAPTER: TypeAdapter = TypeAdapter(ConstraintSchema)


def oracle_from_schema(schema: ConstraintSchema, n: int) -> ConstraintOracle:
    if isinstance(schema, KUniformSchema):
        return KUniform(n if schema.n is None else schema.n, schema.k)
    if isinstance(schema, PartitionSchema):
        return PartitionMatroid(n if schema.n is None else schema.n, schema.blocks, schema.caps)
    if isinstance(schema, KnapsackSchema):
        return Knapsack(schema.sizes, schema.budget)
    if isinstance(schema, MatchingSchema):
        return BipartiteMatching(schema.edges)
    return graphic_matroid(schema.edges)


def oracle_from_descriptor(descriptor: dict) -> ConstraintOracle:
    """Rebuild an oracle from ``ConstraintOracle.describe()`` output, restrictions included."""
    kind = descriptor.get("kind")
    if kind == "restricted":
        return RestrictedOracle(oracle_from_descriptor(descriptor["base"]), descriptor["allowed"])
    try:
        schema = _CONSTRAINT_ADAPTER.validate_python(descriptor)
    except ValidationError as exc:
        raise InstanceLoadError(f"cannot rebuild constraint {kind!r}: {exc.errors()[0]['msg']}") from exc
    return oracle_from_schema(schema, int(descriptor.get("n", 0)))


# ---------------------------------------------------------------------------
# Instances
# ---------------------------------------------------------------------------

class ModelSchema(BaseModel):
    kind: ModelKind = ModelKind.STANDARD
    discount: float = 0.0
    cost_division: Optional[List[float]] = None


class ElementSchema(BaseModel):
    id: int
    cost: float
    atoms: List[Tuple[float, float, float]]


class InstanceSchema(BaseModel):
    name: str = ""
    model: ModelSchema = Field(default_factory=ModelSchema)
    constraint: ConstraintSchema
    elements: List[ElementSchema] = Field(..., min_length=1)


def instance_from_schema(schema: InstanceSchema, strict: bool = False) -> Instance:
    n = len(schema.elements)
    try:
        constraint = oracle_from_schema(schema.constraint, n)
        model = UtilityModel(
            kind=schema.model.kind,
            discount=schema.model.discount,
            cost_division=None if schema.model.cost_division is None else tuple(schema.model.cost_division),
        )
        instance = build_instance(
            [e.atoms for e in schema.elements],
            [e.cost for e in schema.elements],
            constraint,
            model,
            name=schema.name,
            strict=strict,
        )
    except PandoraError as exc:
        raise InstanceLoadError(f"instance {schema.name or '<unnamed>'}: {exc.message}") from exc
    # keep file ids so validation can report mismatches
    elements = tuple(
        Element(spec.id, e.dist, e.cost) for e, spec in zip(instance.elements, schema.elements)
    )
    return Instance(elements, instance.constraint, instance.model, instance.name)


def instance_to_schema(instance: Instance) -> InstanceSchema:
    descriptor = instance.constraint.describe()
    if descriptor.get("kind") in ("restricted", "matroid_oracle"):
        raise InstanceLoadError(f"constraint kind {descriptor['kind']!r} has no file representation")
    model = instance.model
    return InstanceSchema(
        name=instance.name,
        model=ModelSchema(
            kind=model.kind,
            discount=model.discount,
            cost_division=None if model.cost_division is None else list(model.cost_division),
        ),
        constraint=_CONSTRAINT_ADAPTER.validate_python(descriptor),
        elements=[
            ElementSchema(id=e.id, cost=e.cost, atoms=[(a.x, a.y, a.p) for a in e.dist.atoms])
            for e in instance.elements
        ],
    )


# ---------------------------------------------------------------------------
# Files
# ---------------------------------------------------------------------------

def parse_instance(text: str, strict: bool = False, source: str = "<string>") -> Instance:
    try:
        schema = InstanceSchema.model_validate_json(text)
    except ValidationError as exc:
        first = exc.errors()[0]
        where = ".".join(str(part) for part in first["loc"])
        raise InstanceLoadError(f"{source}: {where}: {first['msg']}") from exc
    return instance_from_schema(schema, strict=strict)


def load_instance(path: Union[str, Path], strict: bool = False) -> Instance:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InstanceLoadError(f"cannot read {path}: {exc}") from exc
    instance = parse_instance(text, strict=strict, source=str(path))
    logger.debug("load_instance: %s n=%d", path, instance.n)
    return instance


def dump_instance(instance: Instance) -> str:
    payload = instance_to_schema(instance).model_dump(mode="json")
    return json.dumps(payload, sort_keys=True, indent=2)
