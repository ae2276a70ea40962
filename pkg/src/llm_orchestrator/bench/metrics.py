"""Evaluation metrics: success rate, latency, TTFT percentiles, cost, efficiency, radar."""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import asdict, dataclass

from llm_orchestrator.errors import DegenerateRangeError, EmptyInputError, UndefinedEfficiencyError
from llm_orchestrator.orchestration.outcome import InferenceOutcome
from llm_orchestrator.scoring import NormalizationStats, WeightProfile, normalize_metric
from llm_orchestrator.scoring.weights import BALANCED

RADAR_SCALE = 10.0
RADAR_DIMENSIONS = ("accuracy", "latency", "scalability", "utilization", "robustness")


@dataclass(frozen=True)
class MetricsReport:
    """Aggregate metrics over a set of request outcomes."""

    total: int
    successes: int
    failures: int
    in_flight: int
    success_rate: float
    avg_latency: float
    ttft_p50: float
    ttft_p95: float
    ttft_p99: float
    throughput: float
    total_cost: float
    cost_per_query: float
    accuracy: float

    def to_dict(self) -> dict[str, float | int]:
        return asdict(self)


def percentile(values: Sequence[float], q: float) -> float:
    """
    Nearest-rank percentile: the smallest value with at least q% of values at or below it.

    Raises:
        EmptyInputError: If ``values`` is empty
        ValueError: If q is outside (0, 100]
    """
    if not values:
        raise EmptyInputError("Percentile of an empty sample")
    if not 0 < q <= 100:
        raise ValueError(f"Percentile must be in (0, 100], got {q}")
    ordered = sorted(values)
    rank = math.ceil(q / 100 * len(ordered))
    return ordered[max(rank, 1) - 1]


def success_rate(successes: int, total: int) -> float:
    """N_s / N_t."""
    if total <= 0:
        raise EmptyInputError("Success rate of zero requests")
    return successes / total


def compute_metrics(
    outcomes: Sequence[InferenceOutcome],
    extra_cost: float = 0.0,
    elapsed: float | None = None,
) -> MetricsReport:
    """
    Aggregate per-request outcomes.

    Average latency covers successful requests only. TTFT percentiles use
    every request that produced a first token. Throughput is completions per
    second over ``elapsed`` (default: first arrival to last finish).

    Args:
        outcomes: Per-request outcomes (in-flight ones have ``success=None``)
        extra_cost: Cost not attributable to requests (e.g. replica time)
        elapsed: Measurement span in seconds

    Returns:
        Metrics report

    Raises:
        EmptyInputError: If there are no outcomes
    """
    if not outcomes:
        raise EmptyInputError("No outcomes to compute metrics from")

    total = len(outcomes)
    successes = [o for o in outcomes if o.success is True]
    failures = sum(1 for o in outcomes if o.success is False)
    in_flight = total - len(successes) - failures

    latencies = [o.latency for o in successes if o.latency is not None]
    avg_latency = math.fsum(latencies) / len(latencies) if latencies else 0.0

    ttfts = [o.ttft for o in outcomes if o.ttft is not None]
    p50, p95, p99 = (percentile(ttfts, q) if ttfts else 0.0 for q in (50, 95, 99))

    if elapsed is None:
        finishes = [o.finished_at for o in outcomes if o.finished_at is not None]
        start = min(o.arrival_time for o in outcomes)
        elapsed = (max(finishes) - start) if finishes else 0.0
    throughput = len(successes) / elapsed if elapsed > 0 else 0.0

    total_cost = math.fsum(o.cost for o in outcomes) + extra_cost
    return MetricsReport(
        total=total,
        successes=len(successes),
        failures=failures,
        in_flight=in_flight,
        success_rate=success_rate(len(successes), total),
        avg_latency=avg_latency,
        ttft_p50=p50,
        ttft_p95=p95,
        ttft_p99=p99,
        throughput=throughput,
        total_cost=total_cost,
        cost_per_query=total_cost / total,
        accuracy=math.fsum(o.accuracy for o in outcomes) / total,
    )


def compute_efficiency(
    accuracy: float, baseline_accuracy: float, cost: float, baseline_cost: float
) -> float:
    """
    Accuracy gain per cost ratio: (A_r / A_b) / (C_r / C_b).

    Raises:
        UndefinedEfficiencyError: If baseline accuracy, baseline cost or cost is not positive
    """
    if baseline_accuracy <= 0 or baseline_cost <= 0 or cost <= 0:
        raise UndefinedEfficiencyError(
            f"Efficiency undefined for A_b={baseline_accuracy}, C_b={baseline_cost}, C_r={cost}"
        )
    return (accuracy / baseline_accuracy) / (cost / baseline_cost)


def normalize_radar(values: Sequence[float]) -> list[float]:
    """
    Min-max scale to [0, 10].

    Raises:
        DegenerateRangeError: If all values are equal (or fewer than two are given)
    """
    if len(values) < 2:
        raise DegenerateRangeError("Radar normalization needs at least two values")
    low, high = min(values), max(values)
    if high == low:
        raise DegenerateRangeError(f"All radar values equal {low}")
    return [RADAR_SCALE * (v - low) / (high - low) for v in values]


def radar_scores(
    reports: dict[str, MetricsReport], utilization: dict[str, float] | None = None
) -> dict[str, dict[str, float]]:
    """
    Five-dimension radar data per strategy, larger is better on every axis.

    Latency is negated before scaling. A dimension on which every strategy is
    equal scores 10 for all.
    """
    names = list(reports)
    utilization = utilization or {}
    raw = {
        "accuracy": [reports[n].accuracy for n in names],
        "latency": [-reports[n].avg_latency for n in names],
        "scalability": [reports[n].throughput for n in names],
        "utilization": [utilization.get(n, 0.0) for n in names],
        "robustness": [reports[n].success_rate for n in names],
    }
    scores: dict[str, dict[str, float]] = {n: {} for n in names}
    for dimension in RADAR_DIMENSIONS:
        try:
            scaled = normalize_radar(raw[dimension])
        except DegenerateRangeError:
            scaled = [RADAR_SCALE] * len(names)
        for name, value in zip(names, scaled):
            scores[name][dimension] = value
    return scores


def composite_score(
    outcomes: Sequence[InferenceOutcome],
    latency_bounds: tuple[float, float],
    cost_bounds: tuple[float, float],
    profile: WeightProfile = BALANCED,
) -> float:
    """
    Mean per-request orchestration score against fixed matrix bounds.

    Each successful request scores w_R * accuracy + w_T * (1 - norm(latency))
    + w_C * (1 - norm(cost)), with norm the min-max over the given bounds;
    failed and in-flight requests score 0.

    Raises:
        EmptyInputError: If there are no outcomes
    """
    if not outcomes:
        raise EmptyInputError("No outcomes to score")
    w_r, w_t, w_c = profile.weights
    lat_stats = NormalizationStats(min(latency_bounds), max(latency_bounds), 2)
    cost_stats = NormalizationStats(min(cost_bounds), max(cost_bounds), 2)
    total = 0.0
    for o in outcomes:
        if not o.success or o.latency is None:
            continue
        total += (
            w_r * o.accuracy
            + w_t * (1.0 - normalize_metric(o.latency, lat_stats))
            + w_c * (1.0 - normalize_metric(o.cost, cost_stats))
        )
    return total / len(outcomes)
