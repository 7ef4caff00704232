from pandora_delegation.config.logging_config import configure_logging, get_logger
from pandora_delegation.config.settings import SAMPLE_CHUNK, Settings, get_settings, reload_settings

__all__ = [
    "SAMPLE_CHUNK",
    "Settings",
    "configure_logging",
    "get_logger",
    "get_settings",
    "reload_settings",
]
