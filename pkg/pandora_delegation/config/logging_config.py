"""Logging setup.

Library modules log through the standard ``logging`` module
(``logger = logging.getLogger(__name__)``).  Entry points (CLI, gap sweeps)
call ``configure_logging()`` once, which routes every record through
structlog's ``ProcessorFormatter`` so stdlib and structlog events share one
renderer.  Logs go to stderr; reports go to stdout or ``--out``.
"""

from __future__ import annotations

import logging
import sys
from typing import Optional

import structlog

from pandora_delegation.config.settings import get_settings

_CONFIGURED = False


def configure_logging(level: Optional[str] = None, json_logs: Optional[bool] = None) -> None:
    """Install the shared handler on the root logger (idempotent)."""
    global _CONFIGURED
    settings = get_settings()
    level_name = (level or settings.log_level).upper()
    as_json = settings.log_json if json_logs is None else json_logs

    shared = [
        structlog.contextvars.merge_contextvars,
        structlog.stdlib.add_log_level,
        structlog.stdlib.add_logger_name,
        structlog.processors.TimeStamper(fmt="iso"),
    ]
    renderer = (
        structlog.processors.JSONRenderer(sort_keys=True)
        if as_json
        else structlog.dev.ConsoleRenderer(colors=False)
    )

    structlog.configure(
        processors=shared + [structlog.stdlib.ProcessorFormatter.wrap_for_formatter],
        logger_factory=structlog.stdlib.LoggerFactory(),
        wrapper_class=structlog.stdlib.BoundLogger,
        cache_logger_on_first_use=True,
    )

    formatter = structlog.stdlib.ProcessorFormatter(
        foreign_pre_chain=shared,
        processors=[
            structlog.stdlib.ProcessorFormatter.remove_processors_meta,
            renderer,
        ],
    )
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(formatter)

    root = logging.getLogger()
    if _CONFIGURED:
        for old in list(root.handlers):
            if getattr(old, "_pandora_handler", False):
                root.removeHandler(old)
    handler._pandora_handler = True  # type: ignore[attr-defined]
    root.addHandler(handler)
    root.setLevel(getattr(logging, level_name, logging.WARNING))
    _CONFIGURED = True


def get_logger(name: str):
    return structlog.get_logger(name)
