import logging
from typing import Any

from app.core.config import LOG_LEVEL

LOG_FORMAT = "%(asctime)s %(levelname)-5s [%(name)s] %(message)s"


def configure_logging(level: str | None = None) -> None:
    """Install the single root handler used by the command line."""
    logging.basicConfig(
        level=(level or LOG_LEVEL).upper(),
        format=LOG_FORMAT,
        datefmt="%H:%M:%S",
        force=True,
    )


def kv(**fields: Any) -> str:
    """Render fields as `key=value` pairs, floats rounded for readability."""
    parts = []
    for key, value in fields.items():
        if isinstance(value, float):
            value = f"{value:.4g}"
        parts.append(f"{key}={value}")
    return " ".join(parts)
