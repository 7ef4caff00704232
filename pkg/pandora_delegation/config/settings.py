"""Runtime settings for pandora_delegation.

All knobs are read from the environment (a ``.env`` file in the working
directory is loaded first via python-dotenv).  Nothing else in the package
reads ``os.environ`` directly.

ENVIRONMENT VARIABLES:
    | Variable               | Default | Meaning                                             |
    |------------------------|---------|-----------------------------------------------------|
    | PANDORA_ENUM_GUARD     | 1e7     | max states for exact DPs (optimal policy, agent)    |
    | PANDORA_PROFILE_GUARD  | 1e6     | max joint profiles for exact expectations           |
    | PANDORA_MC_SAMPLES     | 100000  | default Monte Carlo sample count                    |
    | PANDORA_SENTINEL       | 1e9     | large finite value standing in for "infinity"       |
    | PANDORA_TOLERANCE      | 1e-9    | comparison tolerance (absolute and relative)        |
    | PANDORA_JOBS           | 1       | worker processes for gap sweeps                     |
    | PANDORA_LOG_LEVEL      | WARNING | root log level                                      |
    | PANDORA_LOG_JSON       | false   | render log lines as JSON                            |

Settings are resolved once and cached; ``reload_settings()`` clears the cache
(tests use it together with ``monkeypatch.setenv``).
"""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

from dotenv import load_dotenv

from pandora_delegation.errors import ConfigurationError

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Defaults
# ---------------------------------------------------------------------------

DEFAULT_ENUM_GUARD = 10_000_000
DEFAULT_PROFILE_GUARD = 1_000_000
DEFAULT_MC_SAMPLES = 100_000
DEFAULT_SENTINEL = 1e9
DEFAULT_TOLERANCE = 1e-9

# Fixed chunk size for seeded sampling; results never depend on worker count.
SAMPLE_CHUNK = 10_000


@dataclass(frozen=True)
class Settings:
    enum_guard: int = DEFAULT_ENUM_GUARD
    profile_guard: int = DEFAULT_PROFILE_GUARD
    mc_samples: int = DEFAULT_MC_SAMPLES
    sentinel: float = DEFAULT_SENTINEL
    tolerance: float = DEFAULT_TOLERANCE
    jobs: int = 1
    log_level: str = "WARNING"
    log_json: bool = False


# ---------------------------------------------------------------------------
# Environment parsing
# ---------------------------------------------------------------------------

def _env_number(name: str, default, cast):
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        # "1e7" is a convenient spelling for integer guards
        value = cast(float(raw)) if cast is int else cast(raw)
    except ValueError as exc:
        raise ConfigurationError(f"{name}={raw!r} is not a valid number") from exc
    if value <= 0:
        raise ConfigurationError(f"{name} must be positive, got {raw!r}")
    return value


def _env_bool(name: str, default: bool) -> bool:
    raw = os.getenv(name)
    if raw is None:
        return default
    return raw.strip().lower() in {"1", "true", "yes", "on"}


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Return the process-wide settings, loading ``.env`` on first use."""
    load_dotenv(Path.cwd() / ".env", override=False)
    settings = Settings(
        enum_guard=_env_number("PANDORA_ENUM_GUARD", DEFAULT_ENUM_GUARD, int),
        profile_guard=_env_number("PANDORA_PROFILE_GUARD", DEFAULT_PROFILE_GUARD, int),
        mc_samples=_env_number("PANDORA_MC_SAMPLES", DEFAULT_MC_SAMPLES, int),
        sentinel=_env_number("PANDORA_SENTINEL", DEFAULT_SENTINEL, float),
        tolerance=_env_number("PANDORA_TOLERANCE", DEFAULT_TOLERANCE, float),
        jobs=_env_number("PANDORA_JOBS", 1, int),
        log_level=os.getenv("PANDORA_LOG_LEVEL", "WARNING").upper(),
        log_json=_env_bool("PANDORA_LOG_JSON", False),
    )
    logger.debug("settings resolved: %s", settings)
    return settings


def reload_settings() -> Settings:
    get_settings.cache_clear()
    return get_settings()
