"""LLM Orchestrator - multi-model routing and lifecycle orchestration."""

__version__ = "0.1.0"
__author__ = "Platform Engineering Team"
