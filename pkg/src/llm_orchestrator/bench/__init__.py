"""Benchmark harness: metrics, traces, strategy comparison and grid search."""

from llm_orchestrator.bench.metrics import (
    MetricsReport,
    composite_score,
    compute_efficiency,
    compute_metrics,
    normalize_radar,
    percentile,
    radar_scores,
)
from llm_orchestrator.bench.traces import TraceRecord, read_trace, write_trace

__all__ = [
    "MetricsReport",
    "TraceRecord",
    "composite_score",
    "compute_efficiency",
    "compute_metrics",
    "normalize_radar",
    "percentile",
    "radar_scores",
    "read_trace",
    "write_trace",
]
