"""Simulated backend pool: replica lifecycles, FIFO queues, latency sampling and cost."""

from __future__ import annotations

import math
from collections import deque
from collections.abc import Sequence
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from llm_orchestrator.config.models import OutputTokenKind, SimServiceConfig
from llm_orchestrator.errors import SimulationConfigError
from llm_orchestrator.orchestration.outcome import InferenceOutcome
from llm_orchestrator.orchestration.scaling import ScaleCommand
from llm_orchestrator.simulation.events import EventKind, SimClock, SimEvent
from llm_orchestrator.utils.logging import get_logger

logger = get_logger(__name__)

DEFAULT_REQUEST_TIMEOUT = 120.0
DEFAULT_MAX_OUTPUT_TOKENS = 2048


class ReplicaStatus(str, Enum):
    """Lifecycle of a simulated replica."""

    BOOTING = "booting"
    READY = "ready"
    DRAINING = "draining"


@dataclass
class SimReplica:
    replica_id: int
    status: ReplicaStatus
    created_at: float
    busy: int = 0


@dataclass
class SimJob:
    """A request inside the pool, queued or in service."""

    request_id: str
    service_id: str
    arrival_time: float
    cold_start: bool = False
    benchmark_tag: str | None = None
    replica_id: int | None = None
    start_time: float | None = None
    first_token_time: float | None = None
    end_time: float | None = None
    output_tokens: int = 0
    success: bool | None = None
    error: str | None = None
    cost: float = 0.0


@dataclass
class ServiceStats:
    """Running accumulators for one service."""

    submitted: int = 0
    completed: int = 0
    failed: int = 0
    replica_seconds: float = 0.0
    busy_slot_seconds: float = 0.0
    in_system_area: float = 0.0
    peak_in_service: int = 0
    capacity_violations: int = 0


@dataclass
class _ServiceRuntime:
    config: SimServiceConfig
    replicas: dict[int, SimReplica] = field(default_factory=dict)
    queue: deque[SimJob] = field(default_factory=deque)
    stats: ServiceStats = field(default_factory=ServiceStats)
    in_service: int = 0
    in_system: int = 0
    last_change: float = 0.0

    def live(self) -> list[SimReplica]:
        return [r for r in self.replicas.values() if r.status != ReplicaStatus.DRAINING]

    def serving_capacity(self) -> int:
        serving = sum(1 for r in self.replicas.values() if r.status != ReplicaStatus.BOOTING)
        return serving * self.config.concurrency_per_replica


class SimBackendPool:
    """
    Replica sets and queues of every simulated service.

    The pool schedules its own events (first token, completion, failure,
    replica readiness) on the shared clock; the engine hands them back through
    ``finish`` and ``on_replica_ready``. Each started request draws its output
    length first and then one uniform for failure injection, so the random
    stream does not depend on which failure branch is taken.
    """

    def __init__(
        self,
        services: Sequence[SimServiceConfig],
        clock: SimClock,
        rng: np.random.Generator,
        request_timeout: float = DEFAULT_REQUEST_TIMEOUT,
        max_output_tokens: int = DEFAULT_MAX_OUTPUT_TOKENS,
    ) -> None:
        self.clock = clock
        self.rng = rng
        self.request_timeout = request_timeout
        self.max_output_tokens = max_output_tokens
        self._services = {s.service_id: _ServiceRuntime(s) for s in services}
        self._jobs: dict[str, SimJob] = {}
        self._next_replica_id = 0

    @property
    def service_ids(self) -> list[str]:
        return list(self._services)

    def config(self, service_id: str) -> SimServiceConfig:
        return self._runtime(service_id).config

    def stats(self, service_id: str) -> ServiceStats:
        return self._runtime(service_id).stats

    def replica_counts(self, service_id: str) -> dict[ReplicaStatus, int]:
        counts = {status: 0 for status in ReplicaStatus}
        for replica in self._runtime(service_id).replicas.values():
            counts[replica.status] += 1
        return counts

    def in_service(self, service_id: str) -> int:
        return self._runtime(service_id).in_service

    def queue_length(self, service_id: str) -> int:
        return len(self._runtime(service_id).queue)

    def provision(self, service_id: str, count: int, time: float) -> None:
        """Add ``count`` replicas that are ready immediately (pre-provisioned capacity)."""
        runtime = self._runtime(service_id)
        for _ in range(count):
            replica = self._new_replica(runtime, ReplicaStatus.READY, time)
            logger.debug(f"Provisioned replica {replica.replica_id} of {service_id}")

    def submit(
        self,
        service_id: str,
        request_id: str,
        time: float,
        cold_start: bool = False,
        benchmark_tag: str | None = None,
    ) -> list[SimEvent]:
        """
        Accept a request at ``time``.

        A free slot starts it at once; otherwise it waits FIFO and fails at the
        request timeout if still queued then.

        Returns:
            Events scheduled by this call

        Raises:
            SimulationConfigError: If the service is not configured
        """
        runtime = self._runtime(service_id)
        job = SimJob(request_id, service_id, time, cold_start, benchmark_tag)
        self._jobs[request_id] = job
        runtime.stats.submitted += 1
        self._track(runtime, time, +1)

        replica = self._free_replica(runtime)
        if replica is not None and not runtime.queue:
            return self._start(runtime, job, replica, time)
        runtime.queue.append(job)
        return [
            self.clock.schedule(
                time + self.request_timeout,
                EventKind.FAILURE,
                service_id=service_id,
                request_id=request_id,
                reason="queue_timeout",
            )
        ]

    def apply_scale(self, command: ScaleCommand, time: float) -> list[SimEvent]:
        """
        Move each deployment in ``command.allocation`` to its new live replica count.

        Scale-up boots new replicas that become ready after the cold-start
        duration. Scale-down removes booting replicas (newest first), then idle
        ready ones, then marks busy ones draining; a draining replica leaves
        when its last request finishes.

        Returns:
            The ReplicaReady events scheduled
        """
        events: list[SimEvent] = []
        for service_id, count in command.allocation.items():
            events.extend(self._scale_service(service_id, count, time))
        logger.debug(
            f"Applied scale {command.model_id} -> {command.new_replica_count} "
            f"{dict(command.allocation)} at {time:.2f}"
        )
        return events

    def _scale_service(self, service_id: str, count: int, time: float) -> list[SimEvent]:
        runtime = self._runtime(service_id)
        live = runtime.live()
        diff = count - len(live)
        events: list[SimEvent] = []

        if diff > 0:
            for _ in range(diff):
                replica = self._new_replica(runtime, ReplicaStatus.BOOTING, time)
                events.append(
                    self.clock.schedule(
                        time + runtime.config.cold_start_duration,
                        EventKind.REPLICA_READY,
                        service_id=service_id,
                        replica_id=replica.replica_id,
                    )
                )
        elif diff < 0:
            remaining = -diff
            booting = sorted(
                (r for r in live if r.status == ReplicaStatus.BOOTING),
                key=lambda r: r.replica_id,
                reverse=True,
            )
            idle = sorted(
                (r for r in live if r.status == ReplicaStatus.READY and r.busy == 0),
                key=lambda r: r.replica_id,
                reverse=True,
            )
            busy = sorted(
                (r for r in live if r.status == ReplicaStatus.READY and r.busy > 0),
                key=lambda r: r.replica_id,
                reverse=True,
            )
            for replica in (booting + idle + busy)[:remaining]:
                if replica.busy:
                    replica.status = ReplicaStatus.DRAINING
                else:
                    self._remove_replica(runtime, replica, time)
            if not runtime.live():
                self._fail_queue(runtime, time)

        return events

    def on_replica_ready(self, event: SimEvent) -> list[SimEvent]:
        """Mark a booted replica ready and start queued work on it."""
        runtime = self._runtime(event.payload["service_id"])
        replica = runtime.replicas.get(event.payload["replica_id"])
        if replica is None or replica.status != ReplicaStatus.BOOTING:
            return []
        replica.status = ReplicaStatus.READY
        return self._drain_queue(runtime, event.time)

    def finish(self, event: SimEvent) -> InferenceOutcome | None:
        """
        Settle a Completion or Failure event.

        Returns:
            The request outcome, or None for a stale queue-timeout event
        """
        request_id = event.payload["request_id"]
        job = self._jobs.get(request_id)
        if job is None:
            return None
        runtime = self._runtime(job.service_id)
        if event.payload.get("reason") == "queue_timeout":
            if job.start_time is not None:
                return None
            runtime.queue.remove(job)
            job.success = False
            job.error = f"timed out after {self.request_timeout:.0f}s in queue"
            job.end_time = event.time
        else:
            self._release(runtime, job, event.time)

        del self._jobs[request_id]
        self._track(runtime, event.time, -1)
        if job.success:
            runtime.stats.completed += 1
        else:
            runtime.stats.failed += 1
        self._drain_queue(runtime, event.time)
        return self._outcome(job)

    def finalize(self, horizon: float) -> list[InferenceOutcome]:
        """
        Close the books at ``horizon``.

        Replica time and busy slot time are accrued up to the horizon; requests
        still queued or in service are returned as in-flight outcomes.
        """
        for runtime in self._services.values():
            for replica in runtime.replicas.values():
                runtime.stats.replica_seconds += max(0.0, horizon - replica.created_at)
            self._track(runtime, horizon, 0)
        outcomes = []
        for job in sorted(self._jobs.values(), key=lambda j: (j.arrival_time, j.request_id)):
            if job.start_time is not None and job.replica_id is not None:
                self._services[job.service_id].stats.busy_slot_seconds += max(
                    0.0, horizon - job.start_time
                )
            job.success = None
            job.end_time = None
            if job.first_token_time is not None and job.first_token_time > horizon:
                job.first_token_time = None
            outcomes.append(self._outcome(job))
        self._jobs.clear()
        return outcomes

    def replica_cost(self, service_id: str) -> float:
        runtime = self._runtime(service_id)
        return runtime.stats.replica_seconds / 3600.0 * runtime.config.replica_cost_per_hour

    def gpu_utilization(self, service_id: str) -> float:
        """Busy slot-seconds over provisioned slot-seconds."""
        runtime = self._runtime(service_id)
        slots = runtime.stats.replica_seconds * runtime.config.concurrency_per_replica
        return runtime.stats.busy_slot_seconds / slots if slots > 0 else 0.0

    def draw_output_tokens(self, config: SimServiceConfig) -> int:
        spec = config.output_tokens
        if spec.kind == OutputTokenKind.UNIFORM:
            return int(self.rng.integers(spec.low or 0, (spec.high or 0) + 1))
        if spec.kind == OutputTokenKind.LOGNORMAL:
            mu = math.log(spec.mean) - spec.sigma**2 / 2
            return max(1, round(float(self.rng.lognormal(mu, spec.sigma))))
        return max(0, round(spec.mean))

    def _runtime(self, service_id: str) -> _ServiceRuntime:
        try:
            return self._services[service_id]
        except KeyError:
            raise SimulationConfigError(f"Service '{service_id}' is not simulated") from None

    def _new_replica(
        self, runtime: _ServiceRuntime, status: ReplicaStatus, time: float
    ) -> SimReplica:
        replica = SimReplica(self._next_replica_id, status, time)
        self._next_replica_id += 1
        runtime.replicas[replica.replica_id] = replica
        return replica

    def _remove_replica(self, runtime: _ServiceRuntime, replica: SimReplica, time: float) -> None:
        runtime.stats.replica_seconds += time - replica.created_at
        del runtime.replicas[replica.replica_id]

    @staticmethod
    def _free_replica(runtime: _ServiceRuntime) -> SimReplica | None:
        limit = runtime.config.concurrency_per_replica
        for replica in runtime.replicas.values():
            if replica.status == ReplicaStatus.READY and replica.busy < limit:
                return replica
        return None

    def _track(self, runtime: _ServiceRuntime, time: float, delta: int) -> None:
        runtime.stats.in_system_area += runtime.in_system * (time - runtime.last_change)
        runtime.last_change = time
        runtime.in_system += delta

    def _start(
        self, runtime: _ServiceRuntime, job: SimJob, replica: SimReplica, time: float
    ) -> list[SimEvent]:
        config = runtime.config
        tokens = self.draw_output_tokens(config)
        draw = float(self.rng.random())
        deadline = job.arrival_time + self.request_timeout

        if time >= deadline:
            job.start_time = time
            job.success = False
            job.error = f"timed out after {self.request_timeout:.0f}s"
            return [
                self.clock.schedule(
                    time, EventKind.FAILURE, service_id=job.service_id, request_id=job.request_id
                )
            ]

        replica.busy += 1
        runtime.in_service += 1
        runtime.stats.peak_in_service = max(runtime.stats.peak_in_service, runtime.in_service)
        if runtime.in_service > runtime.serving_capacity():
            runtime.stats.capacity_violations += 1
        job.replica_id = replica.replica_id
        job.start_time = time
        job.cost = config.unit_cost

        first_token = time + config.base_ttft
        produced = min(tokens, self.max_output_tokens)
        end = first_token + produced * config.per_token_latency
        job.success = False
        if end > deadline:
            end = deadline
            job.error = f"timed out after {self.request_timeout:.0f}s"
            if config.per_token_latency > 0:
                done = int((end - first_token) / config.per_token_latency)
                produced = max(0, min(produced, done))
        elif tokens > self.max_output_tokens:
            job.error = f"output exceeded {self.max_output_tokens} tokens"
        elif draw < config.failure_probability:
            job.error = "backend error"
        else:
            job.success = True
        job.output_tokens = produced if first_token <= end else 0
        job.end_time = end

        events = []
        if first_token <= end:
            job.first_token_time = first_token
            events.append(
                self.clock.schedule(
                    first_token,
                    EventKind.FIRST_TOKEN,
                    service_id=job.service_id,
                    request_id=job.request_id,
                )
            )
        kind = EventKind.COMPLETION if job.success else EventKind.FAILURE
        events.append(
            self.clock.schedule(end, kind, service_id=job.service_id, request_id=job.request_id)
        )
        return events

    def _release(self, runtime: _ServiceRuntime, job: SimJob, time: float) -> None:
        if job.replica_id is None:
            return
        replica = runtime.replicas[job.replica_id]
        replica.busy -= 1
        runtime.in_service -= 1
        runtime.stats.busy_slot_seconds += time - (job.start_time or time)
        if replica.status == ReplicaStatus.DRAINING and replica.busy == 0:
            self._remove_replica(runtime, replica, time)

    def _drain_queue(self, runtime: _ServiceRuntime, time: float) -> list[SimEvent]:
        events: list[SimEvent] = []
        while runtime.queue:
            replica = self._free_replica(runtime)
            if replica is None:
                break
            job = runtime.queue.popleft()
            events.extend(self._start(runtime, job, replica, time))
        return events

    def _fail_queue(self, runtime: _ServiceRuntime, time: float) -> None:
        while runtime.queue:
            job = runtime.queue.popleft()
            job.start_time = time
            job.success = False
            job.error = "no replicas left"
            job.end_time = time
            self.clock.schedule(
                time, EventKind.FAILURE, service_id=job.service_id, request_id=job.request_id
            )

    def _outcome(self, job: SimJob) -> InferenceOutcome:
        ttft = None if job.first_token_time is None else job.first_token_time - job.arrival_time
        latency = None if job.end_time is None else job.end_time - job.arrival_time
        return InferenceOutcome(
            prompt_id=job.request_id,
            service_id=job.service_id,
            success=job.success,
            arrival_time=job.arrival_time,
            ttft=ttft,
            latency=latency,
            cost=job.cost,
            cold_start=job.cold_start,
            completion=f"[simulated {job.output_tokens} tokens]" if job.success else "",
            error=job.error,
            output_tokens=job.output_tokens,
            benchmark_tag=job.benchmark_tag,
        )
