"""Service matrix registry and rolling telemetry."""

from llm_orchestrator.registry.models import (
    BackendSpec,
    HealthState,
    ModelSpec,
    ServiceInstance,
    make_service_id,
)
from llm_orchestrator.registry.registry import (
    RegistrySnapshot,
    ServiceRegistry,
    healthy_candidates,
)
from llm_orchestrator.registry.telemetry import TelemetrySample, TelemetryWindow

__all__ = [
    "BackendSpec",
    "HealthState",
    "ModelSpec",
    "RegistrySnapshot",
    "ServiceInstance",
    "ServiceRegistry",
    "TelemetrySample",
    "TelemetryWindow",
    "healthy_candidates",
    "make_service_id",
]
