"""Service matrix value types."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from pydantic import BaseModel, ConfigDict, Field

from llm_orchestrator.routing.types import ModelTier
from llm_orchestrator.scoring.normalization import NormalizationStats

SERVICE_ID_SEPARATOR = "@"


def make_service_id(model_id: str, backend_id: str) -> str:
    """Service id of a matrix cell, e.g. ``llama-3-70b@vllm``."""
    return f"{model_id}{SERVICE_ID_SEPARATOR}{backend_id}"


class HealthState(str, Enum):
    """Service health. Only Healthy services are routable by default."""

    HEALTHY = "healthy"
    DEGRADED = "degraded"
    DOWN = "down"


class ModelSpec(BaseModel):
    """A language model that can be deployed on one or more backends."""

    model_config = ConfigDict(frozen=True)

    model_id: str = Field(..., min_length=1)
    tier: ModelTier
    parameter_count: int = Field(default=0, ge=0, description="Informational only")
    warm_pool_floor: int | None = Field(
        default=None, ge=0, description="Overrides the policy's per-tier warm floor"
    )


class BackendSpec(BaseModel):
    """An inference backend (serving engine)."""

    model_config = ConfigDict(frozen=True)

    backend_id: str = Field(..., min_length=1)
    throughput_class: int = Field(default=2, ge=1, le=3)
    latency_class: int = Field(default=2, ge=1, le=3)
    memory_class: int = Field(default=2, ge=1, le=3)


@dataclass(frozen=True)
class ServiceInstance:
    """
    One cell of the service matrix: a model deployed on a backend.

    Instances are immutable; the registry publishes updated copies.
    """

    model_id: str
    backend_id: str
    tier: ModelTier = ModelTier.MEDIUM
    health: HealthState = HealthState.HEALTHY
    replicas: int = 0
    inflight: int = 0
    concurrency_per_replica: int = 4
    unit_cost: float = 0.0
    latency_prior: float = 1.0
    cold_start_duration: float = 12.0
    endpoint: str | None = None
    mean_latency: float | None = None
    latency_stats: NormalizationStats = field(default_factory=NormalizationStats)
    cost_stats: NormalizationStats = field(default_factory=NormalizationStats)
    service_id: str = ""

    def __post_init__(self) -> None:
        if not self.service_id:
            object.__setattr__(self, "service_id", make_service_id(self.model_id, self.backend_id))
        if self.replicas < 0 or self.inflight < 0:
            raise ValueError("replicas and inflight must be non-negative")
        if self.concurrency_per_replica < 1:
            raise ValueError("concurrency_per_replica must be positive")
        if self.unit_cost < 0 or self.latency_prior < 0 or self.cold_start_duration < 0:
            raise ValueError("unit_cost, latency_prior and cold_start_duration must be >= 0")

    @property
    def capacity(self) -> int:
        return self.replicas * self.concurrency_per_replica

    @property
    def latency_estimate(self) -> float:
        """Mean successful latency in the window, or the prior without samples."""
        return self.latency_prior if self.mean_latency is None else self.mean_latency

    @property
    def is_cold(self) -> bool:
        return self.replicas == 0

    @property
    def utilization(self) -> float:
        """inflight / (replicas * concurrency); 0 for a cold service."""
        return self.inflight / self.capacity if self.capacity else 0.0

    def to_dict(self) -> dict[str, object]:
        return {
            "service_id": self.service_id,
            "model_id": self.model_id,
            "backend_id": self.backend_id,
            "tier": self.tier.value,
            "health": self.health.value,
            "replicas": self.replicas,
            "inflight": self.inflight,
            "concurrency_per_replica": self.concurrency_per_replica,
            "utilization": self.utilization,
            "unit_cost": self.unit_cost,
            "latency_prior": self.latency_prior,
            "mean_latency": self.mean_latency,
            "cold_start_duration": self.cold_start_duration,
            "latency_stats": _stats_dict(self.latency_stats),
            "cost_stats": _stats_dict(self.cost_stats),
        }


def _stats_dict(stats: NormalizationStats) -> dict[str, float | int]:
    return {
        "min": stats.metric_min,
        "max": stats.metric_max,
        "samples": stats.sample_count,
        "window": stats.window_duration,
    }
