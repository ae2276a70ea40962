"""Wire models of the gateway HTTP API."""

from __future__ import annotations

from typing import Any

from pydantic import BaseModel, Field, field_validator

from llm_orchestrator.registry import HealthState
from llm_orchestrator.routing import ComplexityClass, RoutingMode


class RouteRequest(BaseModel):
    """Body of ``POST /v1/route``."""

    prompt: str
    profile: str | None = None
    mode: RoutingMode | None = None
    request_id: str | None = Field(default=None, min_length=1, max_length=200)

    @field_validator("prompt")
    @classmethod
    def _check_prompt(cls, value: str) -> str:
        if not value.strip():
            raise ValueError("prompt must not be empty")
        return value


class RouteResponse(BaseModel):
    """
    Result of a routed request.

    Routing fields (service, complexity, components, score, profile) are None
    when the gateway is configured not to expose routing metadata.
    """

    request_id: str
    completion: str
    ttft: float | None = None
    latency: float | None = None
    cold_start: bool = False
    cost: float = 0.0
    streamed: bool = True
    output_tokens: int = 0
    service_id: str | None = None
    tier: str | None = None
    complexity: ComplexityClass | None = None
    probabilities: list[float] | None = None
    components: dict[str, float] | None = None
    score: float | None = None
    profile: str | None = None


class HealthUpdate(BaseModel):
    """Body of ``POST /health/{service_id}``."""

    health: HealthState


class ErrorBody(BaseModel):
    """JSON body of every error response."""

    error: str
    detail: str
    service_id: str | None = None
    known_profiles: list[str] | None = None
    request_id: str | None = None

    def to_content(self) -> dict[str, Any]:
        return self.model_dump(exclude_none=True)
