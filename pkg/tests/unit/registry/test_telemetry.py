"""Unit tests for the rolling telemetry window."""

import math

import numpy as np
import pytest

from llm_orchestrator.registry import TelemetrySample, TelemetryWindow


def _sample(
    timestamp: float, latency: float, success: bool = True, cost: float = 0.0
) -> TelemetrySample:
    return TelemetrySample(
        timestamp=timestamp, latency=latency, ttft=0.1, success=success, cost=cost
    )


class TestStats:
    """Tests for window min/max and means."""

    def test_single_sample(self) -> None:
        """Test one sample gives min = max = its latency."""
        window = TelemetryWindow(300.0)
        window.add_sample(_sample(0.0, 2.0))
        stats = window.latency_stats()
        assert (stats.metric_min, stats.metric_max, stats.sample_count) == (2.0, 2.0, 1)

    def test_three_samples(self) -> None:
        """Test samples {1, 3, 5} give min 1 and max 5."""
        window = TelemetryWindow(300.0)
        for t, latency in enumerate((3.0, 1.0, 5.0)):
            window.add_sample(_sample(float(t), latency))
        stats = window.latency_stats()
        assert (stats.metric_min, stats.metric_max) == (1.0, 5.0)
        assert window.mean_success_latency() == pytest.approx(3.0)

    def test_empty_window(self) -> None:
        """Test an empty window reports no samples and no mean."""
        window = TelemetryWindow(60.0)
        assert window.latency_stats().sample_count == 0
        assert window.mean_success_latency() is None
        assert window.newest is None

    def test_failures_excluded_from_mean(self) -> None:
        """Test failed samples count toward min/max but not the mean."""
        window = TelemetryWindow(300.0)
        window.add_sample(_sample(0.0, 2.0))
        window.add_sample(_sample(1.0, 100.0, success=False))
        assert window.mean_success_latency() == pytest.approx(2.0)
        assert window.latency_stats().metric_max == 100.0
        assert window.success_counts() == (1, 1)

    def test_non_positive_window(self) -> None:
        """Test the window duration must be positive."""
        with pytest.raises(ValueError):
            TelemetryWindow(0.0)


class TestPrune:
    """Tests for pruning."""

    def test_old_samples_dropped(self) -> None:
        """Test samples older than the window fall out of the stats."""
        window = TelemetryWindow(10.0)
        window.add_sample(_sample(0.0, 50.0))
        window.add_sample(_sample(5.0, 1.0))
        window.add_sample(_sample(20.0, 3.0))
        assert [s.timestamp for s in window.samples()] == [20.0]
        stats = window.latency_stats()
        assert (stats.metric_min, stats.metric_max) == (3.0, 3.0)

    def test_prune_idempotent(self) -> None:
        """Test pruning twice changes nothing."""
        window = TelemetryWindow(10.0)
        for t in range(30):
            window.add_sample(_sample(float(t), float(t % 7)))
            window.add_request(float(t))
        window.prune()
        before = (window.samples(), window.latency_stats(), window.request_rate())
        window.prune()
        assert (window.samples(), window.latency_stats(), window.request_rate()) == before

    def test_matches_recompute_oracle(self) -> None:
        """Test incremental stats equal a from-scratch recompute under random writes."""
        rng = np.random.default_rng(17)
        window = TelemetryWindow(25.0)
        inserted: list[TelemetrySample] = []
        t = 0.0
        for _ in range(2000):
            t += float(rng.exponential(1.0))
            timestamp = t - float(rng.uniform(0, 5)) if rng.random() < 0.1 else t
            sample = _sample(
                timestamp,
                float(rng.uniform(0.1, 10.0)),
                success=bool(rng.random() < 0.8),
                cost=float(rng.uniform(0.0, 0.05)),
            )
            window.add_sample(sample)
            inserted.append(sample)

            newest = max(s.timestamp for s in inserted)
            alive = [s for s in inserted if s.timestamp >= newest - 25.0]
            assert sorted(s.timestamp for s in window.samples()) == sorted(
                s.timestamp for s in alive
            )
            lat = window.latency_stats()
            cost = window.cost_stats()
            assert lat.metric_min == min(s.latency for s in alive)
            assert lat.metric_max == max(s.latency for s in alive)
            assert cost.metric_min == min(s.cost for s in alive)
            assert cost.metric_max == max(s.cost for s in alive)
            successes = [s.latency for s in alive if s.success]
            mean = window.mean_success_latency()
            if successes:
                assert mean == pytest.approx(math.fsum(successes) / len(successes), rel=1e-9)
            else:
                assert mean is None
            if len(inserted) > 200:
                inserted = [s for s in inserted if s.timestamp >= newest - 25.0]


class TestRequestRate:
    """Tests for request_rate."""

    def test_rate_defaults_to_newest(self) -> None:
        """Test 150 requests over 300 s give 0.5 req/s."""
        window = TelemetryWindow(300.0)
        for i in range(150):
            window.add_request(2.0 * i)
        assert window.request_rate() == pytest.approx(0.5)

    def test_out_of_order_requests(self) -> None:
        """Test late requests are still counted in order."""
        window = TelemetryWindow(300.0)
        for ts in (1.0, 5.0, 3.0, 4.0, 2.0):
            window.add_request(ts)
        assert window.request_rate(2.0, now=5.0) == pytest.approx(1.0)

    def test_invalid_window(self) -> None:
        """Test a non-positive rate window is rejected."""
        window = TelemetryWindow(300.0)
        with pytest.raises(ValueError):
            window.request_rate(0.0)
