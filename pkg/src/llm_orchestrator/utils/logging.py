"""Logging utilities."""

import logging
import sys
from pathlib import Path

from rich.logging import RichHandler

DEFAULT_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

# Per-request chatter from HTTP clients and the ASGI server; replays and proxy
# runs issue thousands of requests.
NOISY_LOGGERS = ("httpx", "httpcore", "uvicorn.access")


def setup_logging(
    level: str = "INFO",
    format_string: str | None = None,
    rich_console: bool = False,
    log_file: Path | None = None,
) -> list[logging.Handler]:
    """
    Set up logging for the orchestrator processes (CLI, gateway, harness).

    Args:
        level: Logging level (DEBUG, INFO, WARNING, ERROR, CRITICAL)
        format_string: Custom format string (uses default if not provided)
        rich_console: Render console records with rich instead of plain stdout
        log_file: Also append plain records to this file

    Returns:
        The installed handlers
    """
    if format_string is None:
        format_string = DEFAULT_FORMAT
    numeric_level = getattr(logging, level.upper())

    handlers: list[logging.Handler] = []
    if rich_console:
        console: logging.Handler = RichHandler(show_path=False, rich_tracebacks=True)
        console.setFormatter(logging.Formatter("%(name)s - %(message)s"))
        handlers.append(console)
    else:
        handlers.append(logging.StreamHandler(sys.stdout))
    if log_file is not None:
        log_file.parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(log_file, encoding="utf-8")
        file_handler.setFormatter(logging.Formatter(format_string))
        handlers.append(file_handler)

    logging.basicConfig(level=numeric_level, format=format_string, handlers=handlers, force=True)

    quiet_level = numeric_level if numeric_level <= logging.DEBUG else logging.WARNING
    for name in NOISY_LOGGERS:
        logging.getLogger(name).setLevel(quiet_level)
    return handlers


def get_logger(name: str) -> logging.Logger:
    """
    Get a logger instance.

    Args:
        name: Name of the logger (typically __name__)

    Returns:
        Logger instance
    """
    return logging.getLogger(name)
