"""Min-max normalization of service metrics over rolling telemetry."""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass
from enum import Enum

EPSILON = 1e-9
NEUTRAL = 0.5


class NormalizationScope(str, Enum):
    """Which statistics a candidate's metric is normalized against."""

    MATRIX = "matrix"
    PER_SERVICE = "per_service"


@dataclass(frozen=True)
class NormalizationStats:
    """Snapshot of a metric's range over a telemetry window."""

    metric_min: float = 0.0
    metric_max: float = 0.0
    sample_count: int = 0
    window_duration: float = 300.0

    def __post_init__(self) -> None:
        if self.sample_count < 0:
            raise ValueError("sample_count must be non-negative")
        if self.sample_count >= 1 and self.metric_min > self.metric_max:
            raise ValueError(
                f"metric_min {self.metric_min} exceeds metric_max {self.metric_max}"
            )

    def with_observation(self, value: float) -> NormalizationStats:
        """Stats extended by one extra observation."""
        if self.sample_count == 0:
            return NormalizationStats(value, value, 1, self.window_duration)
        return NormalizationStats(
            min(self.metric_min, value),
            max(self.metric_max, value),
            self.sample_count + 1,
            self.window_duration,
        )


def normalize_metric(value: float, stats: NormalizationStats) -> float:
    """
    Min-max normalize ``value`` against ``stats``.

    Args:
        value: Raw metric value
        stats: Range statistics

    Returns:
        Value in [0, 1]; 0.5 when there are fewer than two samples or the range is flat
    """
    if stats.sample_count < 2:
        return NEUTRAL
    spread = stats.metric_max - stats.metric_min
    if spread < EPSILON:
        return NEUTRAL
    scaled = (value - stats.metric_min) / spread
    return min(1.0, max(0.0, scaled))


def pool_stats(stats: Iterable[NormalizationStats]) -> NormalizationStats:
    """Merge per-service stats into one matrix-wide range."""
    pooled: NormalizationStats | None = None
    for item in stats:
        if item.sample_count == 0:
            continue
        if pooled is None:
            pooled = item
            continue
        pooled = NormalizationStats(
            min(pooled.metric_min, item.metric_min),
            max(pooled.metric_max, item.metric_max),
            pooled.sample_count + item.sample_count,
            max(pooled.window_duration, item.window_duration),
        )
    return pooled or NormalizationStats()
