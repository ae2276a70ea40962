"""Configuration management package."""

from llm_orchestrator.config.loader import ConfigLoader
from llm_orchestrator.config.models import (
    GatewayConfig,
    MatrixConfig,
    ProfilesConfig,
    ScenarioConfig,
    SimServiceConfig,
)
from llm_orchestrator.config.validator import ConfigValidator

__all__ = [
    "ConfigLoader",
    "ConfigValidator",
    "GatewayConfig",
    "MatrixConfig",
    "ProfilesConfig",
    "ScenarioConfig",
    "SimServiceConfig",
]
