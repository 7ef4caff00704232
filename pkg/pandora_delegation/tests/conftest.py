"""Shared fixtures: instance files under data/instances and small hand-built instances."""

from __future__ import annotations

from pathlib import Path
from typing import List

import pytest

from pandora_delegation.config.settings import get_settings
from pandora_delegation.constraints.oracles import Knapsack, KUniform
from pandora_delegation.core.model import Instance, ModelKind, UtilityModel, build_instance
from pandora_delegation.harness.families import FamilyId, FamilySpec, generate_family

_PROJECT_ROOT = Path(__file__).resolve().parents[2]
DATA_DIR = _PROJECT_ROOT / "data" / "instances"


@pytest.fixture(autouse=True)
def _fresh_settings():
    """Settings are cached per process; every test starts from the environment."""
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture
def two_boxes() -> Instance:
    """Caps (2, 1.5); E[OPT] = 0.25*2 + 0.75*0.5*1.5 = 1.0625."""
    return build_instance(
        [
            [(4.0, 4.0, 0.25), (0.0, 0.0, 0.75)],
            [(2.0, 2.0, 0.5), (0.0, 0.0, 0.5)],
        ],
        [0.5, 0.25],
        KUniform(2, 1),
        name="two_boxes",
    )


@pytest.fixture
def knapsack_gap() -> Instance:
    """Adaptive optimum 2.125 lies strictly below the surrogate 2.25."""
    return build_instance(
        [
            [(2.0, 2.0, 1.0)],
            [(2.0, 2.0, 0.5), (0.0, 0.0, 0.5)],
            [(2.0, 2.0, 0.5), (0.0, 0.0, 0.5)],
        ],
        [0.0, 0.25, 0.25],
        Knapsack([1.0, 0.5, 0.5], 1.0),
        name="knapsack_gap",
    )


@pytest.fixture
def binary_instance() -> Instance:
    return build_instance(
        [
            [(4.0, 1.0, 0.5), (0.0, 0.0, 0.5)],
            [(3.0, 2.0, 0.5), (0.0, 0.0, 0.5)],
            [(2.0, 3.0, 0.5), (0.0, 0.0, 0.5)],
        ],
        [0.5, 0.5, 0.25],
        KUniform(3, 2),
        UtilityModel(ModelKind.BINARY),
        name="binary_uniform",
    )


@pytest.fixture
def random_instances():
    """``make(family, n, seeds, **params)``: seeded instances from the random families."""

    def make(family: FamilyId, n: int, seeds, **params) -> List[Instance]:
        return [generate_family(FamilySpec(family, n, seed=s, params=dict(params))) for s in seeds]

    return make
