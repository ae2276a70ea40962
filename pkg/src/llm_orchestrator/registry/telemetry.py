"""Rolling per-service telemetry window."""

from __future__ import annotations

import bisect
import math
from collections import deque
from dataclasses import dataclass

from llm_orchestrator.scoring.normalization import NormalizationStats

DEFAULT_WINDOW_SECONDS = 300.0


@dataclass(frozen=True)
class TelemetrySample:
    """One finished request as seen by telemetry."""

    timestamp: float
    latency: float
    ttft: float
    success: bool
    cost: float = 0.0


class _SlidingExtreme:
    """Monotonic deque tracking the min (or max) of a time-ordered window."""

    def __init__(self, largest: bool) -> None:
        self._largest = largest
        self._items: deque[tuple[float, float]] = deque()

    def push(self, timestamp: float, value: float) -> None:
        if self._largest:
            while self._items and self._items[-1][1] <= value:
                self._items.pop()
        else:
            while self._items and self._items[-1][1] >= value:
                self._items.pop()
        self._items.append((timestamp, value))

    def evict_before(self, cutoff: float) -> None:
        while self._items and self._items[0][0] < cutoff:
            self._items.popleft()

    def clear(self) -> None:
        self._items.clear()

    def peek(self) -> float:
        return self._items[0][1]


class TelemetryWindow:
    """
    Time-ordered request timestamps and completion samples for one service.

    Samples older than ``window_duration`` relative to the newest timestamp
    seen are pruned on every write. Min/max are maintained with monotonic
    deques and the success-latency mean with running sums, so reads are O(1).
    A sample arriving out of timestamp order triggers a full rebuild.
    """

    def __init__(self, window_duration: float = DEFAULT_WINDOW_SECONDS) -> None:
        if window_duration <= 0:
            raise ValueError("window_duration must be positive")
        self.window_duration = window_duration
        self._samples: deque[TelemetrySample] = deque()
        self._requests: deque[float] = deque()
        self._newest = -math.inf
        self._lat_min = _SlidingExtreme(largest=False)
        self._lat_max = _SlidingExtreme(largest=True)
        self._cost_min = _SlidingExtreme(largest=False)
        self._cost_max = _SlidingExtreme(largest=True)
        self._success_sum = 0.0
        self._success_count = 0

    @property
    def newest(self) -> float | None:
        return None if self._newest == -math.inf else self._newest

    def __len__(self) -> int:
        return len(self._samples)

    def add_request(self, timestamp: float) -> None:
        if self._requests and timestamp < self._requests[-1]:
            bisect.insort(self._requests, timestamp)
        else:
            self._requests.append(timestamp)
        self._newest = max(self._newest, timestamp)
        self.prune()

    def add_sample(self, sample: TelemetrySample) -> None:
        if self._samples and sample.timestamp < self._samples[-1].timestamp:
            idx = bisect.bisect_right(self._samples, sample.timestamp, key=lambda s: s.timestamp)
            self._samples.insert(idx, sample)
            self._newest = max(self._newest, sample.timestamp)
            self._rebuild()
        else:
            self._samples.append(sample)
            self._newest = max(self._newest, sample.timestamp)
            self._index(sample)
        self.prune()

    def prune(self) -> None:
        """Drop everything older than ``window_duration`` before the newest timestamp."""
        if self._newest == -math.inf:
            return
        cutoff = self._newest - self.window_duration
        while self._requests and self._requests[0] < cutoff:
            self._requests.popleft()
        while self._samples and self._samples[0].timestamp < cutoff:
            old = self._samples.popleft()
            if old.success:
                self._success_sum -= old.latency
                self._success_count -= 1
        if self._success_count == 0:
            self._success_sum = 0.0
        for tracker in (self._lat_min, self._lat_max, self._cost_min, self._cost_max):
            tracker.evict_before(cutoff)

    def _index(self, sample: TelemetrySample) -> None:
        self._lat_min.push(sample.timestamp, sample.latency)
        self._lat_max.push(sample.timestamp, sample.latency)
        self._cost_min.push(sample.timestamp, sample.cost)
        self._cost_max.push(sample.timestamp, sample.cost)
        if sample.success:
            self._success_sum += sample.latency
            self._success_count += 1

    def _rebuild(self) -> None:
        for tracker in (self._lat_min, self._lat_max, self._cost_min, self._cost_max):
            tracker.clear()
        self._success_count = 0
        self._success_sum = 0.0
        for sample in self._samples:
            self._index(sample)
        self._success_sum = math.fsum(s.latency for s in self._samples if s.success)

    def latency_stats(self) -> NormalizationStats:
        if not self._samples:
            return NormalizationStats(window_duration=self.window_duration)
        return NormalizationStats(
            self._lat_min.peek(), self._lat_max.peek(), len(self._samples), self.window_duration
        )

    def cost_stats(self) -> NormalizationStats:
        if not self._samples:
            return NormalizationStats(window_duration=self.window_duration)
        return NormalizationStats(
            self._cost_min.peek(), self._cost_max.peek(), len(self._samples), self.window_duration
        )

    def mean_success_latency(self) -> float | None:
        if self._success_count == 0:
            return None
        return self._success_sum / self._success_count

    def request_rate(self, window: float | None = None, now: float | None = None) -> float:
        """Requests per second over ``(now - window, now]``, ``now`` defaulting to the newest."""
        window = self.window_duration if window is None else window
        if window <= 0:
            raise ValueError("window must be positive")
        if not self._requests:
            return 0.0
        now = self._newest if now is None else now
        lo = bisect.bisect_right(self._requests, now - window)
        hi = bisect.bisect_right(self._requests, now)
        return max(0, hi - lo) / window

    def samples(self) -> tuple[TelemetrySample, ...]:
        return tuple(self._samples)

    def success_counts(self) -> tuple[int, int]:
        """(successes, failures) among surviving samples."""
        return self._success_count, len(self._samples) - self._success_count
