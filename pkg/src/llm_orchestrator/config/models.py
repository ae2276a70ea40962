"""Pydantic models for configuration validation."""

from __future__ import annotations

from enum import Enum

from pydantic import BaseModel, Field, field_validator, model_validator

from llm_orchestrator.orchestration.scaling import ScalingPolicy
from llm_orchestrator.orchestration.selection import SelectionStrategy
from llm_orchestrator.registry.models import make_service_id
from llm_orchestrator.routing.router import RoutingMode
from llm_orchestrator.routing.types import (
    DEFAULT_HIGH_KEYWORDS,
    DEFAULT_LOW_KEYWORDS,
    DEFAULT_RELEVANCE,
    ComplexityClass,
    ModelTier,
)
from llm_orchestrator.scoring.normalization import NormalizationScope
from llm_orchestrator.scoring.score import ScoringMode
from llm_orchestrator.scoring.weights import WeightProfile


class OutputTokenKind(str, Enum):
    """Output length distributions."""

    DETERMINISTIC = "deterministic"
    UNIFORM = "uniform"
    LOGNORMAL = "lognormal"


class ScalingMode(str, Enum):
    """Replica management during a simulation."""

    STATIC = "static"
    DYNAMIC = "dynamic"


class ColdStartPreset(str, Enum):
    """Recovery-time presets (seconds) for cold starts."""

    STATIC = "static"
    BASE = "base"
    AUTO = "auto"

    @property
    def seconds(self) -> float:
        return {"static": 45.0, "base": 12.0, "auto": 4.0}[self.value]


class ArrivalKind(str, Enum):
    """Arrival processes."""

    FIXED = "fixed"
    POISSON = "poisson"
    BURSTY = "bursty"
    REPLAY = "replay"


class GatewayMode(str, Enum):
    """Gateway backend mode."""

    SIMULATED = "simulated"
    PROXY = "proxy"


class OutputTokenSpec(BaseModel):
    """Distribution of generated tokens per request."""

    kind: OutputTokenKind = OutputTokenKind.DETERMINISTIC
    mean: float = Field(default=200.0, gt=0)
    low: int | None = Field(default=None, ge=0)
    high: int | None = Field(default=None, ge=0)
    sigma: float = Field(default=0.5, ge=0, description="Log-space std dev for lognormal")

    @model_validator(mode="after")
    def _check_bounds(self) -> OutputTokenSpec:
        if self.kind == OutputTokenKind.UNIFORM:
            if self.low is None or self.high is None or self.low > self.high:
                raise ValueError("uniform output tokens need low <= high")
        return self

    @property
    def expected(self) -> float:
        if self.kind == OutputTokenKind.UNIFORM:
            return (float(self.low or 0) + float(self.high or 0)) / 2
        return self.mean


class ModelConfig(BaseModel):
    """A model row of the service matrix."""

    id: str = Field(..., min_length=1)
    tier: ModelTier
    parameter_count: int = Field(default=0, ge=0)
    warm_pool_floor: int | None = Field(default=None, ge=0)
    unit_cost: float = Field(default=0.01, ge=0, description="Cost per query on a 1.0x backend")
    base_ttft: float = Field(default=0.3, ge=0)
    per_token_latency: float = Field(default=0.02, ge=0)
    latency_prior: float | None = Field(default=None, ge=0)
    output_tokens: OutputTokenSpec = Field(default_factory=OutputTokenSpec)
    failure_probability: float = Field(default=0.0, ge=0, le=1)
    replica_cost_per_hour: float = Field(default=1.0, ge=0)


class BackendConfig(BaseModel):
    """A backend column of the service matrix."""

    id: str = Field(..., min_length=1)
    throughput_class: int = Field(default=2, ge=1, le=3)
    latency_class: int = Field(default=2, ge=1, le=3)
    memory_class: int = Field(default=2, ge=1, le=3)
    latency_factor: float = Field(default=1.0, gt=0)
    cost_factor: float = Field(default=1.0, gt=0)
    concurrency_per_replica: int = Field(default=4, ge=1)


class CellConfig(BaseModel):
    """A deployable (model, backend) pair with optional overrides."""

    model: str
    backend: str
    unit_cost: float | None = Field(default=None, ge=0)
    base_ttft: float | None = Field(default=None, ge=0)
    per_token_latency: float | None = Field(default=None, ge=0)
    latency_prior: float | None = Field(default=None, ge=0)
    failure_probability: float | None = Field(default=None, ge=0, le=1)
    concurrency_per_replica: int | None = Field(default=None, ge=1)
    cold_start_duration: float | None = Field(default=None, ge=0)
    endpoint: str | None = None


class SimServiceConfig(BaseModel):
    """Fully resolved parameters of one matrix cell."""

    service_id: str
    model_id: str
    backend_id: str
    tier: ModelTier
    base_ttft: float = Field(ge=0)
    per_token_latency: float = Field(ge=0)
    output_tokens: OutputTokenSpec = Field(default_factory=OutputTokenSpec)
    cold_start_duration: float = Field(default=12.0, ge=0)
    failure_probability: float = Field(default=0.0, ge=0, le=1)
    unit_cost: float = Field(default=0.0, ge=0)
    concurrency_per_replica: int = Field(default=4, ge=1)
    replica_cost_per_hour: float = Field(default=0.0, ge=0)
    latency_prior: float = Field(default=0.0, ge=0)
    endpoint: str | None = None

    @property
    def expected_latency(self) -> float:
        return self.base_ttft + self.output_tokens.expected * self.per_token_latency


class MatrixConfig(BaseModel):
    """Models, backends and the deployable cells between them."""

    name: str
    description: str | None = None
    cold_start_duration: float = Field(default=12.0, ge=0)
    models: list[ModelConfig] = Field(..., min_length=1)
    backends: list[BackendConfig] = Field(..., min_length=1)
    cells: list[CellConfig] = Field(
        default_factory=list, description="Deployable pairs; empty means the full cross product"
    )

    def model_by_id(self, model_id: str) -> ModelConfig:
        for model in self.models:
            if model.id == model_id:
                return model
        raise KeyError(model_id)

    def backend_by_id(self, backend_id: str) -> BackendConfig:
        for backend in self.backends:
            if backend.id == backend_id:
                return backend
        raise KeyError(backend_id)

    def deployable_cells(self) -> list[CellConfig]:
        if self.cells:
            return list(self.cells)
        return [CellConfig(model=m.id, backend=b.id) for m in self.models for b in self.backends]

    def resolve(self, cold_start_duration: float | None = None) -> list[SimServiceConfig]:
        """
        Effective parameters per cell.

        Model latencies and costs are multiplied by the backend factors unless
        the cell overrides them. ``cold_start_duration`` (e.g. a preset)
        replaces the matrix default but not per-cell overrides.

        Raises:
            KeyError: If a cell references an undeclared model or backend
        """
        resolved = []
        for cell in self.deployable_cells():
            model = self.model_by_id(cell.model)
            backend = self.backend_by_id(cell.backend)
            base_ttft = (
                cell.base_ttft
                if cell.base_ttft is not None
                else model.base_ttft * backend.latency_factor
            )
            per_token = (
                cell.per_token_latency
                if cell.per_token_latency is not None
                else model.per_token_latency * backend.latency_factor
            )
            expected = base_ttft + model.output_tokens.expected * per_token
            prior = cell.latency_prior
            if prior is None and model.latency_prior is not None:
                prior = model.latency_prior * backend.latency_factor
            resolved.append(
                SimServiceConfig(
                    service_id=make_service_id(model.id, backend.id),
                    model_id=model.id,
                    backend_id=backend.id,
                    tier=model.tier,
                    base_ttft=base_ttft,
                    per_token_latency=per_token,
                    output_tokens=model.output_tokens,
                    cold_start_duration=(
                        cell.cold_start_duration
                        if cell.cold_start_duration is not None
                        else cold_start_duration
                        if cold_start_duration is not None
                        else self.cold_start_duration
                    ),
                    failure_probability=(
                        cell.failure_probability
                        if cell.failure_probability is not None
                        else model.failure_probability
                    ),
                    unit_cost=(
                        cell.unit_cost
                        if cell.unit_cost is not None
                        else model.unit_cost * backend.cost_factor
                    ),
                    concurrency_per_replica=(
                        cell.concurrency_per_replica or backend.concurrency_per_replica
                    ),
                    replica_cost_per_hour=model.replica_cost_per_hour,
                    latency_prior=expected if prior is None else prior,
                    endpoint=cell.endpoint,
                )
            )
        return resolved


class RelevanceConfig(BaseModel):
    """Relevance table rows keyed by complexity then tier."""

    high: dict[ModelTier, float] | None = None
    medium: dict[ModelTier, float] | None = None
    low: dict[ModelTier, float] | None = None

    def entries(self) -> dict[ComplexityClass, dict[ModelTier, float]] | None:
        rows = {
            ComplexityClass.HIGH: self.high,
            ComplexityClass.MEDIUM: self.medium,
            ComplexityClass.LOW: self.low,
        }
        if all(row is None for row in rows.values()):
            return None
        return {k: dict(v if v is not None else DEFAULT_RELEVANCE[k]) for k, v in rows.items()}


class RoutingConfig(BaseModel):
    """Complexity router settings."""

    mode: RoutingMode = RoutingMode.HYBRID
    confidence_threshold: float = Field(default=0.6, gt=0, le=1)
    low_keywords: list[str] = Field(default_factory=lambda: sorted(DEFAULT_LOW_KEYWORDS))
    high_keywords: list[str] = Field(default_factory=lambda: sorted(DEFAULT_HIGH_KEYWORDS))
    keywords_file: str | None = Field(
        default=None, description="Rule file under config/routing; replaces the inline lists"
    )
    relevance: RelevanceConfig = Field(default_factory=RelevanceConfig)
    token_thresholds: tuple[int, int] = (64, 256)
    classifier_artifact: str | None = None
    classifier_url: str | None = None
    classifier_timeout: float = Field(default=2.0, gt=0)

    @field_validator("token_thresholds")
    @classmethod
    def _check_thresholds(cls, value: tuple[int, int]) -> tuple[int, int]:
        if not 0 < value[0] < value[1]:
            raise ValueError(f"token_thresholds must satisfy 0 < t1 < t2, got {value}")
        return value


class SelectionConfig(BaseModel):
    """Matrix selection settings."""

    strategy: SelectionStrategy = SelectionStrategy.MULTI_OBJECTIVE
    profile: str = "balanced"
    scope: NormalizationScope = NormalizationScope.MATRIX
    scoring_mode: ScoringMode = ScoringMode.NORMALIZED
    cold_start_surcharge: bool = True
    include_degraded: bool = False


class ArrivalConfig(BaseModel):
    """Arrival process of a scenario."""

    kind: ArrivalKind = ArrivalKind.POISSON
    rate: float = Field(default=1.0, gt=0, description="Requests per second")
    count: int | None = Field(default=None, ge=0, description="Stop after this many arrivals")
    burst_duration: float = Field(default=60.0, gt=0)
    idle_gap: float = Field(default=600.0, ge=0)
    bursts: int = Field(default=3, ge=1)
    trace_file: str | None = None
    complexity_mix: dict[ComplexityClass, float] | None = None

    @model_validator(mode="after")
    def _check_replay(self) -> ArrivalConfig:
        if self.kind == ArrivalKind.REPLAY and not self.trace_file:
            raise ValueError("replay arrivals need trace_file")
        return self


class ScenarioConfig(BaseModel):
    """A simulation scenario."""

    name: str
    description: str | None = None
    matrix: str = Field(..., description="Matrix file name under config/matrices")
    horizon: float = Field(..., gt=0)
    seed: int = 0
    arrivals: ArrivalConfig = Field(default_factory=ArrivalConfig)
    policy: ScalingPolicy = Field(default_factory=ScalingPolicy)
    scaling: ScalingMode = ScalingMode.DYNAMIC
    static_replicas: int = Field(default=2, ge=0)
    prewarm: bool = Field(default=True, description="Dynamic runs start at their warm floors")
    cold_start_preset: ColdStartPreset | None = None
    routing: RoutingConfig = Field(default_factory=lambda: RoutingConfig(mode=RoutingMode.KEYWORD))
    selection: SelectionConfig = Field(default_factory=SelectionConfig)
    request_timeout: float = Field(default=120.0, gt=0)
    max_output_tokens: int = Field(default=2048, ge=1)
    record_events: bool = False


class ProfilesConfig(BaseModel):
    """Named operator profiles."""

    profiles: list[WeightProfile] = Field(..., min_length=1)
    default: str = "balanced"

    @model_validator(mode="after")
    def _check_default(self) -> ProfilesConfig:
        names = [p.name for p in self.profiles]
        if len(set(names)) != len(names):
            raise ValueError(f"Duplicate profile names: {names}")
        if self.default not in names:
            raise ValueError(f"Default profile '{self.default}' is not defined")
        return self

    def as_mapping(self) -> dict[str, WeightProfile]:
        return {p.name: p for p in self.profiles}


class GatewayConfig(BaseModel):
    """HTTP gateway configuration."""

    host: str = "127.0.0.1"
    port: int = Field(default=8080, ge=1, le=65535)
    mode: GatewayMode = GatewayMode.SIMULATED
    matrix: str = Field(..., description="Matrix file name under config/matrices")
    policy: ScalingPolicy = Field(default_factory=ScalingPolicy)
    profiles_file: str = "profiles.yaml"
    routing: RoutingConfig = Field(default_factory=RoutingConfig)
    selection: SelectionConfig = Field(default_factory=SelectionConfig)
    cold_start_preset: ColdStartPreset | None = None
    decision_log: str | None = None
    decision_log_memory: int = Field(
        default=10_000, ge=1, description="Entries kept in memory when no log path is set"
    )
    request_timeout: float = Field(default=120.0, gt=0)
    max_output_tokens: int = Field(default=2048, ge=1)
    cold_start_timeout: float = Field(default=60.0, gt=0)
    expose_routing_metadata: bool = True
    overhead_budget_ms: float = Field(default=5.0, gt=0)
    run_scaling_loop: bool = True
    seed: int = 0
