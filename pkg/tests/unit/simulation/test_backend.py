"""Unit tests for the simulated backend pool."""

import numpy as np
import pytest

from llm_orchestrator.config.models import SimServiceConfig
from llm_orchestrator.orchestration import InferenceOutcome, ScaleCommand, ScaleReason
from llm_orchestrator.routing import ModelTier
from llm_orchestrator.simulation import EventKind, ReplicaStatus, SimBackendPool, SimClock

SID = "m@vllm"


def _service(**overrides: object) -> SimServiceConfig:
    fields: dict[str, object] = {
        "service_id": SID,
        "model_id": "m",
        "backend_id": "vllm",
        "tier": ModelTier.MEDIUM,
        "base_ttft": 0.5,
        "per_token_latency": 0.01,
        "output_tokens": {"kind": "deterministic", "mean": 100},
        "cold_start_duration": 10.0,
        "concurrency_per_replica": 1,
        "unit_cost": 0.01,
        "replica_cost_per_hour": 3.6,
    }
    fields.update(overrides)
    return SimServiceConfig(**fields)  # type: ignore[arg-type]


def _pool(**kwargs: object) -> SimBackendPool:
    service = _service(**kwargs.pop("service", {}))  # type: ignore[arg-type]
    rng = np.random.default_rng(0)
    return SimBackendPool([service], SimClock(), rng, **kwargs)  # type: ignore[arg-type]


def _drain(pool: SimBackendPool, until: float = float("inf")) -> list[InferenceOutcome]:
    outcomes = []
    while (event := pool.clock.peek()) is not None and event.time <= until:
        event = pool.clock.pop()
        if event.kind in (EventKind.COMPLETION, EventKind.FAILURE):
            outcome = pool.finish(event)
            if outcome is not None:
                outcomes.append(outcome)
        elif event.kind == EventKind.REPLICA_READY:
            pool.on_replica_ready(event)
    return outcomes


def _scale(count: int, at: float, reason: ScaleReason = ScaleReason.SCALE_UP) -> ScaleCommand:
    return ScaleCommand("m", count, reason, at, {SID: count})


class TestSubmit:
    """Tests for request service and queueing."""

    def test_single_request_timing(self) -> None:
        """Test TTFT is base_ttft and latency adds per-token time."""
        pool = _pool()
        pool.provision(SID, 1, 0.0)
        pool.submit(SID, "r1", 0.0)
        (outcome,) = _drain(pool)
        assert outcome.success
        assert outcome.ttft == pytest.approx(0.5)
        assert outcome.latency == pytest.approx(1.5)
        assert outcome.output_tokens == 100
        assert outcome.cost == 0.01

    def test_fifo_queue(self) -> None:
        """Test a second request waits for the only slot."""
        pool = _pool()
        pool.provision(SID, 1, 0.0)
        pool.submit(SID, "r1", 0.0)
        pool.submit(SID, "r2", 0.0)
        assert pool.queue_length(SID) == 1
        assert pool.in_service(SID) == 1
        outcomes = {o.prompt_id: o for o in _drain(pool)}
        assert outcomes["r2"].latency == pytest.approx(3.0)
        assert outcomes["r2"].ttft == pytest.approx(2.0)
        assert pool.stats(SID).capacity_violations == 0
        assert pool.stats(SID).peak_in_service == 1

    def test_queue_timeout(self) -> None:
        """Test a request still queued at the timeout fails."""
        pool = _pool(request_timeout=5.0)
        pool.submit(SID, "r1", 0.0)
        (outcome,) = _drain(pool)
        assert outcome.success is False
        assert outcome.latency == pytest.approx(5.0)
        assert outcome.ttft is None
        assert "queue" in (outcome.error or "")

    def test_output_cap(self) -> None:
        """Test output longer than the token cap fails."""
        pool = _pool(max_output_tokens=50)
        pool.provision(SID, 1, 0.0)
        pool.submit(SID, "r1", 0.0)
        (outcome,) = _drain(pool)
        assert outcome.success is False
        assert outcome.output_tokens == 50
        assert "exceeded" in (outcome.error or "")

    def test_injected_failures(self) -> None:
        """Test failure_probability 1 fails every request."""
        pool = _pool(service={"failure_probability": 1.0})
        pool.provision(SID, 1, 0.0)
        pool.submit(SID, "r1", 0.0)
        (outcome,) = _drain(pool)
        assert outcome.success is False
        assert outcome.error == "backend error"


class TestScaling:
    """Tests for replica lifecycles."""

    def test_cold_start(self) -> None:
        """Test a request on a cold service waits for the booted replica."""
        pool = _pool()
        pool.submit(SID, "r1", 0.0, cold_start=True)
        pool.apply_scale(_scale(1, 0.0), 0.0)
        assert pool.replica_counts(SID)[ReplicaStatus.BOOTING] == 1
        (outcome,) = _drain(pool)
        assert outcome.cold_start
        assert outcome.ttft == pytest.approx(10.5)
        assert pool.replica_counts(SID)[ReplicaStatus.READY] == 1

    def test_scale_down_drains_busy_replica(self) -> None:
        """Test a busy replica finishes its request before leaving."""
        pool = _pool()
        pool.provision(SID, 2, 0.0)
        pool.submit(SID, "r1", 0.0)
        pool.apply_scale(_scale(0, 0.5, ScaleReason.IDLE_SCALE_DOWN), 0.5)
        counts = pool.replica_counts(SID)
        assert counts[ReplicaStatus.READY] == 0
        assert counts[ReplicaStatus.DRAINING] == 1
        (outcome,) = _drain(pool)
        assert outcome.success
        assert sum(pool.replica_counts(SID).values()) == 0
        # one replica removed at 0.5, the draining one at 1.5
        assert pool.stats(SID).replica_seconds == pytest.approx(2.0)

    def test_scale_to_zero_fails_queue(self) -> None:
        """Test queued requests fail when the last replica goes away."""
        pool = _pool()
        pool.apply_scale(_scale(1, 0.0), 0.0)
        pool.submit(SID, "r1", 1.0)
        pool.apply_scale(_scale(0, 2.0, ScaleReason.IDLE_SCALE_DOWN), 2.0)
        outcomes = _drain(pool)
        assert [(o.prompt_id, o.success, o.error) for o in outcomes] == [
            ("r1", False, "no replicas left")
        ]
        assert outcomes[0].latency == pytest.approx(1.0)

    def test_replica_cost_and_utilization(self) -> None:
        """Test replica time is billed hourly and utilization counts busy slots."""
        pool = _pool()
        pool.provision(SID, 1, 0.0)
        pool.submit(SID, "r1", 0.0)
        _drain(pool)
        pool.finalize(10.0)
        assert pool.replica_cost(SID) == pytest.approx(10.0 / 3600.0 * 3.6)
        assert pool.gpu_utilization(SID) == pytest.approx(0.15)

    def test_finalize_reports_in_flight(self) -> None:
        """Test unfinished requests come back as in-flight outcomes."""
        pool = _pool()
        pool.provision(SID, 1, 0.0)
        pool.submit(SID, "r1", 0.0)
        pool.submit(SID, "r2", 0.0)
        _drain(pool, until=1.0)
        outcomes = pool.finalize(1.0)
        assert [o.prompt_id for o in outcomes] == ["r1", "r2"]
        assert all(o.in_flight for o in outcomes)
        assert outcomes[0].ttft == pytest.approx(0.5)
        assert outcomes[1].ttft is None
