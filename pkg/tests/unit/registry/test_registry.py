"""Unit tests for the service registry."""

import threading

import numpy as np
import pytest

from llm_orchestrator.errors import ConflictError, ContractViolationError, ServiceNotFoundError
from llm_orchestrator.registry import (
    BackendSpec,
    HealthState,
    ModelSpec,
    ServiceInstance,
    ServiceRegistry,
    healthy_candidates,
)
from llm_orchestrator.routing import ModelTier
from llm_orchestrator.simulation import poisson_offsets
from tests.conftest import RegistryBuilder

MODELS = {
    "gemma": ModelTier.SMALL,
    "llama": ModelTier.MEDIUM,
    "qwen": ModelTier.LARGE,
    "r1": ModelTier.LARGE,
}
BACKENDS = ("vllm", "tensorrt-llm", "tgi")


def _full_matrix() -> ServiceRegistry:
    registry = ServiceRegistry()
    for model_id, tier in MODELS.items():
        for backend_id in BACKENDS:
            registry.register(
                ModelSpec(model_id=model_id, tier=tier),
                BackendSpec(backend_id=backend_id),
                ServiceInstance(model_id=model_id, backend_id=backend_id, replicas=1),
            )
    return registry


class TestRegister:
    """Tests for ServiceRegistry.register."""

    def test_four_by_three(self) -> None:
        """Test 4 models x 3 backends give 12 cells."""
        registry = _full_matrix()
        assert len(registry) == 12
        assert len(registry.snapshot()) == 12
        assert "qwen@tgi" in registry

    def test_tier_copied_from_model(self) -> None:
        """Test the instance tier follows the model spec."""
        registry = _full_matrix()
        assert registry.get("qwen@vllm").tier == ModelTier.LARGE

    def test_duplicate_pair(self) -> None:
        """Test registering the same pair twice is a conflict."""
        registry = _full_matrix()
        with pytest.raises(ConflictError):
            registry.register(
                ModelSpec(model_id="gemma", tier=ModelTier.SMALL),
                BackendSpec(backend_id="vllm"),
                ServiceInstance(model_id="gemma", backend_id="vllm"),
            )

    def test_model_spec_mismatch(self) -> None:
        """Test a model id re-registered with different specs is a conflict."""
        registry = _full_matrix()
        with pytest.raises(ConflictError):
            registry.register(
                ModelSpec(model_id="gemma", tier=ModelTier.LARGE),
                BackendSpec(backend_id="sglang"),
                ServiceInstance(model_id="gemma", backend_id="sglang"),
            )

    def test_instance_must_match_specs(self) -> None:
        """Test the instance ids must match the model and backend."""
        with pytest.raises(ValueError, match="does not match"):
            ServiceRegistry().register(
                ModelSpec(model_id="a", tier=ModelTier.SMALL),
                BackendSpec(backend_id="vllm"),
                ServiceInstance(model_id="b", backend_id="vllm"),
            )

    def test_empty_registry(self) -> None:
        """Test an empty snapshot has no candidates."""
        assert healthy_candidates(ServiceRegistry().snapshot()) == []


class TestSnapshot:
    """Tests for registry snapshots."""

    def test_snapshot_never_mutates(self) -> None:
        """Test writes publish a new version and leave old snapshots untouched."""
        registry = _full_matrix()
        before = registry.snapshot()
        registry.set_health("gemma@vllm", HealthState.DOWN)
        after = registry.snapshot()
        assert before.get("gemma@vllm").health == HealthState.HEALTHY
        assert after.get("gemma@vllm").health == HealthState.DOWN
        assert after.version > before.version

    def test_snapshot_cached_between_writes(self) -> None:
        """Test reads without writes return the same snapshot."""
        registry = _full_matrix()
        assert registry.snapshot() is registry.snapshot()

    def test_unknown_service(self) -> None:
        """Test lookups of unknown ids raise not-found."""
        registry = _full_matrix()
        with pytest.raises(ServiceNotFoundError):
            registry.get("missing@vllm")
        with pytest.raises(ServiceNotFoundError):
            registry.snapshot().get("missing@vllm")
        with pytest.raises(ServiceNotFoundError):
            registry.record_sample("missing@vllm", 1.0, 0.1, True)

    def test_concurrent_writers(self) -> None:
        """Test concurrent health updates leave a consistent final state."""
        registry = _full_matrix()
        ids = [i.service_id for i in registry.snapshot()]

        def flip(service_id: str) -> None:
            for _ in range(50):
                registry.set_health(service_id, HealthState.DEGRADED)
                registry.set_health(service_id, HealthState.HEALTHY)

        threads = [threading.Thread(target=flip, args=(sid,)) for sid in ids]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        snap = registry.snapshot()
        assert all(i.health == HealthState.HEALTHY for i in snap)
        assert snap.version == 12 + 12 * 100


class TestHealthyCandidates:
    """Tests for healthy_candidates."""

    def test_all_down(self, make_registry: RegistryBuilder) -> None:
        """Test an all-Down matrix has no candidates."""
        registry = make_registry({"a@x": {"health": "down"}, "b@x": {"health": "down"}})
        assert healthy_candidates(registry.snapshot()) == []

    def test_healthy_subset(self, make_registry: RegistryBuilder) -> None:
        """Test only Healthy cells are candidates by default."""
        registry = make_registry(
            {
                "a@x": {"replicas": 1},
                "b@x": {"replicas": 1, "health": "degraded"},
                "c@x": {"replicas": 1, "health": "down"},
            }
        )
        snap = registry.snapshot()
        assert [i.service_id for i in healthy_candidates(snap)] == ["a@x"]
        assert [i.service_id for i in healthy_candidates(snap, include_degraded=True)] == [
            "a@x",
            "b@x",
        ]

    def test_cold_cells(self, make_registry: RegistryBuilder) -> None:
        """Test zero-replica cells are included, flagged cold, only when cold start is allowed."""
        registry = make_registry({"a@x": {"replicas": 0}, "b@x": {"replicas": 2}})
        snap = registry.snapshot()
        cold = healthy_candidates(snap, allow_cold=True)
        assert [i.service_id for i in cold] == ["a@x", "b@x"]
        assert cold[0].is_cold
        assert [i.service_id for i in healthy_candidates(snap, allow_cold=False)] == ["b@x"]


class TestTelemetry:
    """Tests for registry telemetry accessors."""

    def test_request_rate(self, make_registry: RegistryBuilder) -> None:
        """Test 150 requests in a 300 s window are 0.5 req/s."""
        registry = make_registry({"a@x": {}})
        for i in range(150):
            registry.record_request("a@x", timestamp=2.0 * i)
        assert registry.get_avg_request_rate("a@x", 300.0) == pytest.approx(0.5)

    def test_request_rate_empty(self, make_registry: RegistryBuilder) -> None:
        """Test an empty window has rate 0."""
        registry = make_registry({"a@x": {}})
        assert registry.get_avg_request_rate("a@x") == 0.0

    def test_request_rate_half_open_window(self, make_registry: RegistryBuilder) -> None:
        """Test the rate counts requests in (now - window, now]."""
        registry = make_registry({"a@x": {}})
        for t in range(10):
            registry.record_request("a@x", timestamp=float(t))
        assert registry.get_avg_request_rate("a@x", 10.0, now=9.0) == pytest.approx(1.0)
        assert registry.get_avg_request_rate("a@x", 10.0, now=10.0) == pytest.approx(0.9)

    def test_poisson_rate_estimate(self, make_registry: RegistryBuilder) -> None:
        """Test the rate over a seeded Poisson trace matches the trace itself."""
        registry = make_registry({"a@x": {}})
        offsets = poisson_offsets(2.0, 300.0, np.random.default_rng(21))
        for t in offsets:
            registry.record_request("a@x", timestamp=t)
        estimate = registry.get_avg_request_rate("a@x", 300.0, now=300.0)
        assert estimate == pytest.approx(len(offsets) / 300.0)
        assert estimate == pytest.approx(2.0, rel=0.25)

    def test_model_rate_sums_backends(self, make_registry: RegistryBuilder) -> None:
        """Test the per-model rate is the sum over its cells."""
        registry = make_registry({"m@x": {}, "m@y": {}, "n@x": {}})
        for t in range(6):
            registry.record_request("m@x", timestamp=float(t))
            registry.record_request("m@y", timestamp=float(t))
            registry.record_request("n@x", timestamp=float(t))
        assert registry.model_request_rate("m", 10.0, now=5.0) == pytest.approx(1.2)

    def test_avg_latency_success_only(self, make_registry: RegistryBuilder) -> None:
        """Test mean latency ignores failures and falls back to the prior."""
        registry = make_registry({"a@x": {"latency_prior": 1.5}, "b@x": {}, "c@x": {}})
        assert registry.get_avg_latency("a@x") == 1.5
        registry.record_sample("b@x", 2.0, 0.1, True, timestamp=1.0)
        registry.record_sample("b@x", 4.0, 0.1, True, timestamp=2.0)
        assert registry.get_avg_latency("b@x") == pytest.approx(3.0)
        registry.record_sample("c@x", 2.0, 0.1, True, timestamp=1.0)
        registry.record_sample("c@x", 100.0, 0.1, False, timestamp=2.0)
        assert registry.get_avg_latency("c@x") == pytest.approx(2.0)

    def test_sample_updates_instance_stats(self, make_registry: RegistryBuilder) -> None:
        """Test samples refresh the instance's normalization stats."""
        registry = make_registry({"a@x": {"unit_cost": 0.01}})
        for t, latency in enumerate((1.0, 3.0, 5.0)):
            registry.record_sample("a@x", latency, 0.1, True, timestamp=float(t))
        instance = registry.get("a@x")
        assert (instance.latency_stats.metric_min, instance.latency_stats.metric_max) == (1.0, 5.0)
        assert instance.cost_stats.metric_min == 0.01
        assert instance.latency_estimate == pytest.approx(3.0)

    def test_admission_control(self, make_registry: RegistryBuilder) -> None:
        """Test inflight above replicas x concurrency is rejected when admission is on."""
        registry = make_registry({"a@x": {"replicas": 1, "concurrency_per_replica": 2}})
        registry.set_inflight("a@x", 2)
        assert registry.get("a@x").utilization == 1.0
        with pytest.raises(ContractViolationError):
            registry.set_inflight("a@x", 3)
        lenient = make_registry(
            {"a@x": {"replicas": 1, "concurrency_per_replica": 2}}, admission_control=False
        )
        lenient.set_inflight("a@x", 3)
        assert lenient.get("a@x").inflight == 3

    def test_negative_replicas(self, make_registry: RegistryBuilder) -> None:
        """Test negative replica counts are rejected."""
        registry = make_registry({"a@x": {}})
        with pytest.raises(ValueError):
            registry.set_replicas("a@x", -1)

    def test_summary(self, make_registry: RegistryBuilder) -> None:
        """Test the JSON summary lists cells with telemetry."""
        registry = make_registry({"a@x": {"tier": "small", "replicas": 1}, "b@x": {}})
        registry.record_request("a@x", timestamp=0.0)
        registry.record_sample("a@x", 2.0, 0.5, True, timestamp=1.0)
        registry.record_sample("a@x", 9.0, 0.5, False, timestamp=2.0)
        summary = registry.summary()
        assert {m["model_id"] for m in summary["models"]} == {"a", "b"}  # type: ignore[index]
        cells = {c["service_id"]: c for c in summary["cells"]}  # type: ignore[union-attr]
        telemetry = cells["a@x"]["telemetry"]
        assert telemetry["successes"] == 1
        assert telemetry["failures"] == 1
        assert telemetry["avg_latency"] == 2.0
        assert cells["a@x"]["tier"] == "small"
