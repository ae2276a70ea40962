"""Replay a trace against a running gateway over HTTP."""

from __future__ import annotations

import asyncio
import json
import time
from collections import Counter
from collections.abc import Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import httpx
from rich.console import Console
from rich.table import Table

from llm_orchestrator.bench.metrics import MetricsReport, compute_metrics
from llm_orchestrator.bench.traces import TraceRecord
from llm_orchestrator.errors import UsageError
from llm_orchestrator.orchestration import InferenceOutcome
from llm_orchestrator.routing import ModelTier, RelevanceTable, RoutingMode
from llm_orchestrator.utils.logging import get_logger

logger = get_logger(__name__)

DEFAULT_CONCURRENCY = 16
DEFAULT_CLIENT_TIMEOUT = 180.0


@dataclass
class ReplayResult:
    """Outcomes of a gateway replay, as seen by the client."""

    base_url: str
    outcomes: list[InferenceOutcome]
    elapsed: float
    status_counts: dict[int, int] = field(default_factory=dict)

    @property
    def metrics(self) -> MetricsReport | None:
        return compute_metrics(self.outcomes) if self.outcomes else None

    def to_dict(self) -> dict[str, Any]:
        metrics = self.metrics
        return {
            "base_url": self.base_url,
            "elapsed": self.elapsed,
            "status_counts": {str(k): v for k, v in sorted(self.status_counts.items())},
            "metrics": metrics.to_dict() if metrics else None,
        }

    def write(self, out_dir: Path, name: str = "replay") -> list[Path]:
        out_dir.mkdir(parents=True, exist_ok=True)
        summary = out_dir / f"{name}.json"
        summary.write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True), encoding="utf-8")
        outcomes = out_dir / f"{name}.outcomes.jsonl"
        with open(outcomes, "w", encoding="utf-8") as f:
            for outcome in self.outcomes:
                f.write(json.dumps(outcome.to_dict(), sort_keys=True) + "\n")
        return [summary, outcomes]

    def render(self, console: Console | None = None) -> None:
        console = console or Console()
        metrics = self.metrics
        table = Table(title=f"Gateway replay: {self.base_url}")
        table.add_column("Metric", style="cyan")
        table.add_column("Value", style="green")
        table.add_row("Requests", str(len(self.outcomes)))
        for status, count in sorted(self.status_counts.items()):
            table.add_row(f"HTTP {status}", str(count))
        if metrics is not None:
            table.add_row("Success rate", f"{metrics.success_rate:.1%}")
            table.add_row("Accuracy credit", f"{metrics.accuracy:.3f}")
            table.add_row("Avg latency (s)", f"{metrics.avg_latency:.3f}")
            table.add_row("TTFT p95 (s)", f"{metrics.ttft_p95:.3f}")
            table.add_row("Cost/query", f"{metrics.cost_per_query:.5f}")
        table.add_row("Wall clock (s)", f"{self.elapsed:.2f}")
        console.print(table)


def outcome_from_response(
    record: TraceRecord,
    status: int,
    body: dict[str, Any],
    arrival_time: float,
    relevance_table: RelevanceTable,
) -> InferenceOutcome:
    """
    Client-side outcome of one gateway response.

    Successful responses earn the relevance of the served tier for the
    record's label, or the router's expected relevance when unlabeled.
    """
    if status != 200:
        return InferenceOutcome(
            prompt_id=record.prompt_id,
            service_id=body.get("service_id"),
            success=False,
            arrival_time=arrival_time,
            error=f"HTTP {status}: {body.get('detail', '')}",
            benchmark_tag=record.benchmark_tag,
        )
    accuracy = 0.0
    tier = body.get("tier")
    if record.complexity is not None and tier:
        accuracy = relevance_table.lookup(record.complexity, ModelTier(tier))
    elif body.get("components"):
        accuracy = float(body["components"].get("relevance_hat", 0.0))
    return InferenceOutcome(
        prompt_id=record.prompt_id,
        service_id=body.get("service_id"),
        success=True,
        arrival_time=arrival_time,
        ttft=body.get("ttft"),
        latency=body.get("latency"),
        cost=float(body.get("cost", 0.0)),
        cold_start=bool(body.get("cold_start", False)),
        completion=body.get("completion", ""),
        output_tokens=int(body.get("output_tokens", 0)),
        accuracy=accuracy,
        streamed=bool(body.get("streamed", True)),
        benchmark_tag=record.benchmark_tag,
    )


async def replay_async(
    trace: Sequence[TraceRecord],
    client: httpx.AsyncClient,
    concurrency: int = DEFAULT_CONCURRENCY,
    profile: str | None = None,
    mode: RoutingMode | None = None,
    honor_offsets: bool = False,
    time_scale: float = 1.0,
    relevance_table: RelevanceTable | None = None,
) -> ReplayResult:
    """
    Send every trace record to ``POST /v1/route`` on ``client``.

    Args:
        trace: Records to send, in order
        client: Client whose base URL points at the gateway
        concurrency: Maximum requests in flight
        profile: Operator profile for every request (gateway default if None)
        mode: Forced routing mode
        honor_offsets: Wait for each record's arrival offset before sending
        time_scale: Multiplier on arrival offsets when honoring them
        relevance_table: Table for the accuracy credit

    Returns:
        Replay result with one outcome per record, in trace order

    Raises:
        UsageError: If concurrency or time_scale is not positive
    """
    if concurrency < 1 or time_scale <= 0:
        raise UsageError("concurrency must be >= 1 and time_scale > 0")
    table = relevance_table or RelevanceTable()
    semaphore = asyncio.Semaphore(concurrency)
    statuses: Counter[int] = Counter()
    start = time.perf_counter()

    async def send(record: TraceRecord) -> InferenceOutcome:
        if honor_offsets:
            delay = start + record.arrival_offset * time_scale - time.perf_counter()
            if delay > 0:
                await asyncio.sleep(delay)
        payload: dict[str, Any] = {"prompt": record.prompt, "request_id": record.prompt_id}
        if profile is not None:
            payload["profile"] = profile
        if mode is not None:
            payload["mode"] = mode.value
        async with semaphore:
            arrival = time.perf_counter() - start
            try:
                response = await client.post("/v1/route", json=payload)
            except httpx.HTTPError as e:
                statuses[0] += 1
                logger.error(f"Request {record.prompt_id} did not reach the gateway: {e}")
                return InferenceOutcome(
                    prompt_id=record.prompt_id,
                    service_id=None,
                    success=False,
                    arrival_time=arrival,
                    error=str(e),
                    benchmark_tag=record.benchmark_tag,
                )
        statuses[response.status_code] += 1
        return outcome_from_response(
            record, response.status_code, response.json(), arrival, table
        )

    outcomes = await asyncio.gather(*(send(record) for record in trace))
    elapsed = time.perf_counter() - start
    logger.info(f"Replayed {len(outcomes)} prompts in {elapsed:.2f}s")
    return ReplayResult(str(client.base_url), list(outcomes), elapsed, dict(statuses))


def replay_gateway(
    trace: Sequence[TraceRecord],
    base_url: str,
    concurrency: int = DEFAULT_CONCURRENCY,
    profile: str | None = None,
    mode: RoutingMode | None = None,
    honor_offsets: bool = False,
    time_scale: float = 1.0,
    relevance_table: RelevanceTable | None = None,
    transport: httpx.AsyncBaseTransport | None = None,
) -> ReplayResult:
    """Blocking wrapper around ``replay_async`` for the CLI."""

    async def _run() -> ReplayResult:
        async with httpx.AsyncClient(
            base_url=base_url, transport=transport, timeout=DEFAULT_CLIENT_TIMEOUT
        ) as client:
            return await replay_async(
                trace,
                client,
                concurrency=concurrency,
                profile=profile,
                mode=mode,
                honor_offsets=honor_offsets,
                time_scale=time_scale,
                relevance_table=relevance_table,
            )

    return asyncio.run(_run())
