"""Utilities package."""

from llm_orchestrator.utils.logging import get_logger, setup_logging

__all__ = [
    "get_logger",
    "setup_logging",
]
