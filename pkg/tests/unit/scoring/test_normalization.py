"""Unit tests for metric normalization."""

import pytest

from llm_orchestrator.scoring import NormalizationStats, normalize_metric, pool_stats


class TestNormalizeMetric:
    """Tests for normalize_metric."""

    def test_bounds(self) -> None:
        """Test min maps to 0 and max maps to 1."""
        stats = NormalizationStats(metric_min=2.0, metric_max=6.0, sample_count=10)
        assert normalize_metric(2.0, stats) == 0.0
        assert normalize_metric(6.0, stats) == 1.0
        assert normalize_metric(3.0, stats) == pytest.approx(0.25)

    def test_clamped_outside_range(self) -> None:
        """Test values outside the window range are clamped."""
        stats = NormalizationStats(metric_min=2.0, metric_max=6.0, sample_count=10)
        assert normalize_metric(-5.0, stats) == 0.0
        assert normalize_metric(50.0, stats) == 1.0

    @pytest.mark.parametrize(
        "stats",
        [
            NormalizationStats(),
            NormalizationStats(metric_min=1.0, metric_max=1.0, sample_count=1),
            NormalizationStats(metric_min=3.0, metric_max=3.0 + 1e-12, sample_count=50),
        ],
    )
    def test_neutral_without_spread(self, stats: NormalizationStats) -> None:
        """Test empty, single-sample and flat windows give 0.5."""
        assert normalize_metric(123.0, stats) == 0.5

    def test_non_decreasing(self) -> None:
        """Test normalization is monotone in the value."""
        stats = NormalizationStats(metric_min=0.1, metric_max=9.0, sample_count=5)
        values = [x / 10 for x in range(-20, 120)]
        normalized = [normalize_metric(v, stats) for v in values]
        assert normalized == sorted(normalized)

    def test_min_above_max_rejected(self) -> None:
        """Test inconsistent stats are rejected."""
        with pytest.raises(ValueError):
            NormalizationStats(metric_min=5.0, metric_max=1.0, sample_count=2)


class TestNormalizationStats:
    """Tests for stats helpers."""

    def test_with_observation(self) -> None:
        """Test adding observations widens the range."""
        stats = NormalizationStats().with_observation(4.0).with_observation(1.0)
        assert (stats.metric_min, stats.metric_max, stats.sample_count) == (1.0, 4.0, 2)

    def test_pool_stats_skips_empty(self) -> None:
        """Test pooling merges ranges and ignores empty windows."""
        pooled = pool_stats(
            [
                NormalizationStats(1.0, 2.0, 3),
                NormalizationStats(),
                NormalizationStats(0.5, 1.5, 2, window_duration=600.0),
            ]
        )
        assert pooled.metric_min == 0.5
        assert pooled.metric_max == 2.0
        assert pooled.sample_count == 5
        assert pooled.window_duration == 600.0

    def test_pool_stats_empty(self) -> None:
        """Test pooling nothing gives empty stats."""
        assert pool_stats([]).sample_count == 0
