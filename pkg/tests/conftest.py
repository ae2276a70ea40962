"""Pytest configuration and shared fixtures."""

from collections.abc import Callable, Mapping
from pathlib import Path

import pytest

from llm_orchestrator.config.loader import ConfigLoader
from llm_orchestrator.config.models import (
    GatewayConfig,
    MatrixConfig,
    RoutingConfig,
    ScenarioConfig,
)
from llm_orchestrator.registry import (
    BackendSpec,
    HealthState,
    ModelSpec,
    ServiceInstance,
    ServiceRegistry,
)
from llm_orchestrator.routing import ModelTier, RoutingMode

PROJECT_CONFIG_DIR = Path(__file__).resolve().parent.parent / "config"


@pytest.fixture
def config_dir() -> Path:
    """The project's shipped config directory."""
    return PROJECT_CONFIG_DIR


@pytest.fixture
def config_loader(config_dir: Path) -> ConfigLoader:
    """Loader over the shipped config directory."""
    return ConfigLoader(config_dir)


@pytest.fixture
def temp_config_dir(tmp_path: Path) -> Path:
    """Empty config directory structure."""
    config_dir = tmp_path / "config"
    for subdir in ("matrices", "scenarios", "gateway", "routing"):
        (config_dir / subdir).mkdir(parents=True)
    return config_dir


@pytest.fixture
def two_tier_matrix() -> MatrixConfig:
    """Small and large model on one backend, deterministic output lengths."""
    return MatrixConfig(
        name="two-tier",
        cold_start_duration=12.0,
        models=[
            {
                "id": "S",
                "tier": "small",
                "unit_cost": 0.002,
                "base_ttft": 0.1,
                "per_token_latency": 0.01,
                "replica_cost_per_hour": 0.4,
                "output_tokens": {"kind": "deterministic", "mean": 100},
            },
            {
                "id": "L",
                "tier": "large",
                "unit_cost": 0.015,
                "base_ttft": 0.4,
                "per_token_latency": 0.04,
                "replica_cost_per_hour": 1.6,
                "output_tokens": {"kind": "deterministic", "mean": 100},
            },
        ],
        backends=[{"id": "vllm"}],
    )


@pytest.fixture
def sample_matrix_data() -> dict[str, object]:
    """Raw matrix file content."""
    return {
        "matrix": {
            "name": "sample",
            "models": [
                {"id": "S", "tier": "small", "unit_cost": 0.002},
                {"id": "L", "tier": "large", "unit_cost": 0.02},
            ],
            "backends": [
                {"id": "vllm"},
                {"id": "tgi", "latency_factor": 1.2, "cost_factor": 0.5},
            ],
        }
    }


@pytest.fixture
def sample_scenario() -> ScenarioConfig:
    """Short Poisson scenario over the two-tier matrix."""
    return ScenarioConfig(
        name="sample",
        matrix="two-tier.yaml",
        horizon=120.0,
        seed=3,
        arrivals={"kind": "poisson", "rate": 1.0},
        routing=RoutingConfig(mode=RoutingMode.KEYWORD),
    )


@pytest.fixture
def gateway_config() -> GatewayConfig:
    """Simulated gateway over the reference matrix; no background loop, in-memory log."""
    return GatewayConfig(
        matrix="reference.yaml",
        routing=RoutingConfig(mode=RoutingMode.KEYWORD, keywords_file="keywords.yaml"),
        run_scaling_loop=False,
        decision_log=None,
    )


RegistryBuilder = Callable[..., ServiceRegistry]


@pytest.fixture
def make_registry() -> RegistryBuilder:
    """
    Build a registry from ``{service_id: overrides}``.

    Service ids are ``model@backend``; ``tier`` defaults to medium and every
    other override is passed to ``ServiceInstance``.
    """

    def build(
        cells: Mapping[str, Mapping[str, object]],
        window: float = 300.0,
        admission_control: bool = True,
    ) -> ServiceRegistry:
        registry = ServiceRegistry(window, admission_control=admission_control)
        for service_id, overrides in cells.items():
            model_id, backend_id = service_id.split("@")
            fields = dict(overrides)
            tier = ModelTier(fields.pop("tier", ModelTier.MEDIUM))
            floor = fields.pop("warm_pool_floor", None)
            health = fields.pop("health", HealthState.HEALTHY)
            registry.register(
                ModelSpec(model_id=model_id, tier=tier, warm_pool_floor=floor),
                BackendSpec(backend_id=backend_id),
                ServiceInstance(
                    model_id=model_id,
                    backend_id=backend_id,
                    tier=tier,
                    health=HealthState(health),
                    **fields,  # type: ignore[arg-type]
                ),
            )
        return registry

    return build
