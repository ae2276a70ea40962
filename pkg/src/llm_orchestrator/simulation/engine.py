"""Discrete-event simulation of the closed routing and scaling loop."""

from __future__ import annotations

import json
from collections import Counter
from collections.abc import Mapping, Sequence
from dataclasses import asdict, dataclass, replace
from pathlib import Path
from typing import Any

import numpy as np

from llm_orchestrator.bench.metrics import MetricsReport, composite_score, compute_metrics
from llm_orchestrator.bench.traces import TraceRecord
from llm_orchestrator.config.models import MatrixConfig, ScalingMode, ScenarioConfig
from llm_orchestrator.errors import NoHealthyServiceError
from llm_orchestrator.factory import EngineFactory, initial_replicas
from llm_orchestrator.orchestration import (
    DecisionLog,
    InferenceOutcome,
    RoutingDecision,
    ScaleCommand,
    ScaleReason,
)
from llm_orchestrator.registry.telemetry import DEFAULT_WINDOW_SECONDS
from llm_orchestrator.routing import ComplexityClass, ComplexityRouter, ModelTier, Prompt
from llm_orchestrator.scoring import WeightProfile
from llm_orchestrator.simulation.backend import SimBackendPool
from llm_orchestrator.simulation.events import EventKind, SimClock, SimEvent
from llm_orchestrator.utils.logging import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class ServiceReport:
    """Per-cell results of a run."""

    service_id: str
    model_id: str
    backend_id: str
    tier: str
    routed: int
    successes: int
    failures: int
    cold_starts: int
    scale_ups: int
    replica_seconds: float
    replica_cost: float
    busy_slot_seconds: float
    gpu_utilization: float
    mean_in_system: float
    peak_in_service: int
    capacity_violations: int

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True)
class SimReport:
    """Everything a run produced. ``to_json`` is deterministic for a fixed seed."""

    scenario: str
    seed: int
    horizon: float
    strategy: str
    profile: str
    routing_mode: str
    scaling: str
    metrics: MetricsReport | None
    composite: float | None
    replica_cost: float
    gpu_utilization: float
    latency_bounds: tuple[float, float]
    cost_bounds: tuple[float, float]
    services: tuple[ServiceReport, ...]
    outcomes: tuple[InferenceOutcome, ...]
    commands: tuple[ScaleCommand, ...]
    events: tuple[SimEvent, ...] = ()

    @property
    def total_requests(self) -> int:
        return len(self.outcomes)

    def service(self, service_id: str) -> ServiceReport:
        for report in self.services:
            if report.service_id == service_id:
                return report
        raise KeyError(service_id)

    def to_dict(self) -> dict[str, Any]:
        """Summary view: metrics, per-service results and scale commands."""
        return {
            "scenario": self.scenario,
            "seed": self.seed,
            "horizon": self.horizon,
            "strategy": self.strategy,
            "profile": self.profile,
            "routing_mode": self.routing_mode,
            "scaling": self.scaling,
            "metrics": self.metrics.to_dict() if self.metrics else None,
            "composite": self.composite,
            "replica_cost": self.replica_cost,
            "gpu_utilization": self.gpu_utilization,
            "latency_bounds": list(self.latency_bounds),
            "cost_bounds": list(self.cost_bounds),
            "services": [s.to_dict() for s in self.services],
            "commands": [c.to_dict() for c in self.commands],
        }

    def to_json(self) -> str:
        payload = self.to_dict()
        payload["outcomes"] = [o.to_dict() for o in self.outcomes]
        payload["events"] = [e.to_dict() for e in self.events]
        return json.dumps(payload, sort_keys=True)

    def write(self, out_dir: Path, name: str | None = None) -> list[Path]:
        """
        Write ``<name>.json`` (summary), ``<name>.outcomes.jsonl`` and, when
        events were recorded, ``<name>.events.jsonl``.
        """
        name = name or self.scenario
        out_dir.mkdir(parents=True, exist_ok=True)
        summary = out_dir / f"{name}.json"
        summary.write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True), encoding="utf-8")
        written = [summary, out_dir / f"{name}.outcomes.jsonl"]
        _write_jsonl(written[1], (o.to_dict() for o in self.outcomes))
        if self.events:
            written.append(out_dir / f"{name}.events.jsonl")
            _write_jsonl(written[2], (e.to_dict() for e in self.events))
        return written


def _write_jsonl(path: Path, rows: Any) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for row in rows:
            f.write(json.dumps(row, sort_keys=True) + "\n")


class Simulation:
    """
    One simulated run of a scenario over a trace.

    Wires a registry, router and orchestrator to a simulated backend pool and
    drives them from a single event loop: arrivals are routed and submitted,
    scale commands take effect as ScaleApplied events at the instant they are
    issued, and the scaling loop ticks every evaluation period (dynamic
    scaling only).
    """

    def __init__(
        self,
        scenario: ScenarioConfig,
        matrix: MatrixConfig,
        trace: Sequence[TraceRecord],
        router: ComplexityRouter | None = None,
        profiles: Mapping[str, WeightProfile] | None = None,
        factory: EngineFactory | None = None,
    ) -> None:
        self.scenario = scenario
        self.matrix = matrix
        self.trace = list(trace)
        self.policy = scenario.policy
        factory = factory or EngineFactory()

        preset = scenario.cold_start_preset
        self.services = matrix.resolve(preset.seconds if preset else None)
        replicas = initial_replicas(
            matrix,
            self.services,
            self.policy,
            scenario.scaling,
            scenario.static_replicas,
            scenario.prewarm,
        )
        self.registry = factory.create_registry(
            matrix,
            self.services,
            replicas,
            window_duration=max(self.policy.rate_window, DEFAULT_WINDOW_SECONDS),
            admission_control=False,
        )
        self.router = router or factory.create_router(scenario.routing)

        pool_seq, orchestrator_seq = np.random.SeedSequence(scenario.seed).spawn(2)
        self.clock = SimClock(scenario.seed)
        self.orchestrator = factory.create_orchestrator(
            self.registry,
            self.router,
            self.policy,
            scenario.selection,
            profiles=profiles,
            decision_log=DecisionLog(keep_in_memory=False),
            seed=int(orchestrator_seq.generate_state(1)[0]),
            clock=lambda: self.clock.current_time,
        )
        self.pool = SimBackendPool(
            self.services,
            self.clock,
            np.random.default_rng(pool_seq),
            request_timeout=scenario.request_timeout,
            max_output_tokens=scenario.max_output_tokens,
        )
        for service_id, count in replicas.items():
            self.pool.provision(service_id, count, 0.0)

        self._decisions: dict[str, tuple[RoutingDecision, ComplexityClass | None]] = {}
        self._outcomes: list[InferenceOutcome] = []
        self._commands: list[ScaleCommand] = []
        self._events: list[SimEvent] = []
        self._routed: Counter[str] = Counter()
        self._cold: Counter[str] = Counter()
        self._request_ids: list[str] = []
        self._finished = False

    def run(self) -> SimReport:
        """
        Advance the clock to the horizon.

        An empty event queue before the horizon ends the run normally.

        Raises:
            RuntimeError: If the simulation already ran
        """
        if self._finished:
            raise RuntimeError("Simulation already ran; build a new one")
        horizon = self.scenario.horizon
        self._request_ids = self._assign_request_ids()
        for index, record in enumerate(self.trace):
            if record.arrival_offset <= horizon:
                self.clock.schedule(record.arrival_offset, EventKind.ARRIVAL, index=index)
        if self.scenario.scaling == ScalingMode.DYNAMIC:
            self.clock.schedule(0.0, EventKind.SCALING_TICK)

        logger.info(
            f"Simulating '{self.scenario.name}': {len(self.trace)} prompts, "
            f"horizon {horizon:.0f}s, {self.scenario.selection.strategy.value}, "
            f"{self.scenario.scaling.value} scaling"
        )
        while True:
            event = self.clock.peek()
            if event is None or event.time > horizon:
                break
            event = self.clock.pop()
            if self.scenario.record_events:
                self._events.append(event)
            self._handle(event)

        self._outcomes.extend(self.pool.finalize(horizon))
        self._finished = True
        report = self._report()
        if report.metrics is not None:
            logger.info(
                f"Finished '{self.scenario.name}': success rate "
                f"{report.metrics.success_rate:.3f}, cost/query {report.metrics.cost_per_query:.5f}"
            )
        return report

    def _assign_request_ids(self) -> list[str]:
        seen: set[str] = set()
        ids = []
        for index, record in enumerate(self.trace):
            request_id = record.prompt_id or f"p{index:06d}"
            if request_id in seen:
                request_id = f"{request_id}#{index}"
            seen.add(request_id)
            ids.append(request_id)
        return ids

    def _handle(self, event: SimEvent) -> None:
        if event.kind == EventKind.ARRIVAL:
            self._on_arrival(event)
        elif event.kind == EventKind.SCALING_TICK:
            self.orchestrator.tick(event.time)
            self._schedule_commands(event.time)
            next_tick = event.time + self.policy.evaluation_period
            if next_tick <= self.scenario.horizon:
                self.clock.schedule(next_tick, EventKind.SCALING_TICK)
        elif event.kind == EventKind.SCALE_APPLIED:
            self.pool.apply_scale(ScaleCommand.from_dict(event.payload), event.time)
        elif event.kind == EventKind.REPLICA_READY:
            self.pool.on_replica_ready(event)
        elif event.kind in (EventKind.COMPLETION, EventKind.FAILURE):
            self._on_finish(event)

    def _on_arrival(self, event: SimEvent) -> None:
        index = event.payload["index"]
        record = self.trace[index]
        request_id = self._request_ids[index]
        prompt = Prompt(
            id=request_id,
            text=record.prompt,
            benchmark_tag=record.benchmark_tag,
            arrival_time=event.time,
        )
        try:
            decision = self.orchestrator.route(
                prompt,
                mode=self.scenario.routing.mode,
                strategy=self.scenario.selection.strategy,
                now=event.time,
            )
        except NoHealthyServiceError as e:
            logger.warning(f"Dropping {request_id} at {event.time:.2f}: {e}")
            self._outcomes.append(
                InferenceOutcome(
                    prompt_id=request_id,
                    service_id=None,
                    success=False,
                    arrival_time=event.time,
                    latency=0.0,
                    error=str(e),
                    benchmark_tag=record.benchmark_tag,
                )
            )
            return

        service_id = decision.service_id
        self._decisions[request_id] = (decision, record.complexity)
        self._routed[service_id] += 1
        if decision.cold_start:
            self._cold[service_id] += 1
            self.orchestrator.request_activation(service_id, event.time)
        self._schedule_commands(event.time)
        self.pool.submit(
            service_id,
            request_id,
            event.time,
            cold_start=decision.cold_start,
            benchmark_tag=record.benchmark_tag,
        )

    def _on_finish(self, event: SimEvent) -> None:
        outcome = self.pool.finish(event)
        if outcome is None:
            return
        decision, label = self._decisions.pop(outcome.prompt_id)
        if outcome.success:
            outcome = replace(outcome, accuracy=accuracy_credit(decision, label, self.router))
        self.orchestrator.record_outcome(outcome)
        self._outcomes.append(outcome)

    def _schedule_commands(self, time: float) -> None:
        for command in self.orchestrator.drain_commands():
            self._commands.append(command)
            self.clock.schedule(time, EventKind.SCALE_APPLIED, **command.to_dict())

    def _report(self) -> SimReport:
        outcomes = tuple(sorted(self._outcomes, key=lambda o: (o.arrival_time, o.prompt_id)))
        latency_bounds = (
            min(s.expected_latency for s in self.services),
            max(s.expected_latency for s in self.services),
        )
        cost_bounds = (
            min(s.unit_cost for s in self.services),
            max(s.unit_cost for s in self.services),
        )
        scale_ups = Counter(
            sid
            for c in self._commands
            if c.reason == ScaleReason.SCALE_UP
            for sid in c.service_ids
        )

        services = []
        replica_cost = 0.0
        busy = 0.0
        slots = 0.0
        for config in self.services:
            sid = config.service_id
            stats = self.pool.stats(sid)
            cost = self.pool.replica_cost(sid)
            replica_cost += cost
            busy += stats.busy_slot_seconds
            slots += stats.replica_seconds * config.concurrency_per_replica
            services.append(
                ServiceReport(
                    service_id=sid,
                    model_id=config.model_id,
                    backend_id=config.backend_id,
                    tier=config.tier.value,
                    routed=self._routed[sid],
                    successes=stats.completed,
                    failures=stats.failed,
                    cold_starts=self._cold[sid],
                    scale_ups=scale_ups[sid],
                    replica_seconds=stats.replica_seconds,
                    replica_cost=cost,
                    busy_slot_seconds=stats.busy_slot_seconds,
                    gpu_utilization=self.pool.gpu_utilization(sid),
                    mean_in_system=stats.in_system_area / self.scenario.horizon,
                    peak_in_service=stats.peak_in_service,
                    capacity_violations=stats.capacity_violations,
                )
            )

        metrics = compute_metrics(outcomes, extra_cost=replica_cost) if outcomes else None
        composite = composite_score(outcomes, latency_bounds, cost_bounds) if outcomes else None
        return SimReport(
            scenario=self.scenario.name,
            seed=self.scenario.seed,
            horizon=self.scenario.horizon,
            strategy=self.scenario.selection.strategy.value,
            profile=self.scenario.selection.profile,
            routing_mode=self.scenario.routing.mode.value,
            scaling=self.scenario.scaling.value,
            metrics=metrics,
            composite=composite,
            replica_cost=replica_cost,
            gpu_utilization=busy / slots if slots > 0 else 0.0,
            latency_bounds=latency_bounds,
            cost_bounds=cost_bounds,
            services=tuple(services),
            outcomes=outcomes,
            commands=tuple(self._commands),
            events=tuple(self._events),
        )


def accuracy_credit(
    decision: RoutingDecision, label: ComplexityClass | None, router: ComplexityRouter
) -> float:
    """
    Routing-success credit of a successful request.

    With a ground-truth label this is the relevance of the chosen tier for
    that label; without one it is the expected relevance the router computed.
    """
    if label is None:
        return decision.components.relevance_hat
    return router.relevance_table.lookup(label, ModelTier(decision.tier))


def run(
    scenario: ScenarioConfig,
    matrix: MatrixConfig,
    trace: Sequence[TraceRecord],
    router: ComplexityRouter | None = None,
    profiles: Mapping[str, WeightProfile] | None = None,
) -> SimReport:
    """Run ``scenario`` over ``trace`` and return its report."""
    return Simulation(scenario, matrix, trace, router=router, profiles=profiles).run()
