"""HTTP gateway: routes prompts to simulated or OpenAI-compatible backends."""

from llm_orchestrator.gateway.app import create_app
from llm_orchestrator.gateway.backends import ProxyBackendPool, SimulatedBackendPool
from llm_orchestrator.gateway.models import HealthUpdate, RouteRequest, RouteResponse
from llm_orchestrator.gateway.service import GatewayService, build_service, status_for_error

__all__ = [
    "GatewayService",
    "HealthUpdate",
    "ProxyBackendPool",
    "RouteRequest",
    "RouteResponse",
    "SimulatedBackendPool",
    "build_service",
    "create_app",
    "status_for_error",
]
