"""Request handling, counters and the background scaling loop of the gateway."""

from __future__ import annotations

import asyncio
import threading
import time
import uuid
from collections import Counter, deque
from collections.abc import Sequence
from pathlib import Path
from typing import Any

from llm_orchestrator.bench.metrics import percentile
from llm_orchestrator.config.loader import ConfigLoader
from llm_orchestrator.config.models import (
    GatewayConfig,
    GatewayMode,
    ScalingMode,
    SimServiceConfig,
)
from llm_orchestrator.errors import (
    ColdStartTimeoutError,
    NoHealthyServiceError,
    ServiceNotFoundError,
    UpstreamError,
)
from llm_orchestrator.factory import EngineFactory, initial_replicas
from llm_orchestrator.gateway.backends import ProxyBackendPool, SimulatedBackendPool
from llm_orchestrator.gateway.models import RouteRequest, RouteResponse
from llm_orchestrator.orchestration import (
    BackendPool,
    DecisionLog,
    InferenceOutcome,
    Orchestrator,
    RoutingDecision,
    dispatch,
)
from llm_orchestrator.registry import HealthState
from llm_orchestrator.registry.telemetry import DEFAULT_WINDOW_SECONDS
from llm_orchestrator.routing import Prompt
from llm_orchestrator.scoring import WeightProfile
from llm_orchestrator.utils.logging import get_logger

logger = get_logger(__name__)

METRIC_SAMPLES = 10_000
PERCENTILES = (50.0, 95.0, 99.0)
# Profile key for requests that failed before a service was selected.
UNROUTED = "unrouted"


def status_for_error(error: BaseException) -> int:
    if isinstance(error, ValueError):
        return 400
    if isinstance(error, ServiceNotFoundError):
        return 404
    if isinstance(error, NoHealthyServiceError):
        return 503
    if isinstance(error, ColdStartTimeoutError):
        return 504
    if isinstance(error, UpstreamError):
        return 502
    return 500


def _percentiles(values: Sequence[float]) -> dict[str, float | None]:
    if not values:
        return {f"p{q:g}": None for q in PERCENTILES}
    return {f"p{q:g}": percentile(values, q) for q in PERCENTILES}


class GatewayService:
    """
    Routes requests through the orchestrator and a backend pool.

    Every handled request, including rejected and failed ones, is written to
    the decision log once and counted once as a success or a failure, under
    the same lock, so the counters always reconcile with the log.
    """

    def __init__(
        self,
        config: GatewayConfig,
        orchestrator: Orchestrator,
        pool: BackendPool,
        services: Sequence[SimServiceConfig] = (),
    ) -> None:
        self.config = config
        self.orchestrator = orchestrator
        self.pool = pool
        self.services = {s.service_id: s for s in services}
        self._lock = threading.Lock()
        self._total = 0
        self._successes = 0
        self._failures = 0
        self._statuses: Counter[int] = Counter()
        self._profile_totals: Counter[str] = Counter()
        self._profile_successes: Counter[str] = Counter()
        self._latencies: deque[float] = deque(maxlen=METRIC_SAMPLES)
        self._ttfts: deque[float] = deque(maxlen=METRIC_SAMPLES)
        self._overheads_ms: deque[float] = deque(maxlen=METRIC_SAMPLES)
        self._inflight: Counter[str] = Counter()

    @property
    def decision_log(self) -> DecisionLog:
        return self.orchestrator.decision_log

    @property
    def profiles(self) -> dict[str, WeightProfile]:
        return self.orchestrator.profiles

    def _finish(
        self,
        request_id: str,
        status: int,
        decision: RoutingDecision | None = None,
        outcome: InferenceOutcome | None = None,
        error: str | None = None,
    ) -> None:
        with self._lock:
            self.decision_log.record(request_id, decision, outcome, error)
            self._total += 1
            self._statuses[status] += 1
            profile = decision.profile.name if decision is not None else UNROUTED
            self._profile_totals[profile] += 1
            if status == 200:
                self._successes += 1
                self._profile_successes[profile] += 1
            else:
                self._failures += 1
            if outcome is not None and outcome.success and outcome.latency is not None:
                self._latencies.append(outcome.latency)
                if outcome.ttft is not None:
                    self._ttfts.append(outcome.ttft)

    def reject(self, request_id: str | None, error: str) -> str:
        """Count and log a request whose body failed validation; returns its id."""
        request_id = request_id or uuid.uuid4().hex
        self._finish(request_id, 400, error=error)
        logger.debug(f"Rejected request {request_id}: {error}")
        return request_id

    def _track(self, service_id: str, delta: int) -> None:
        with self._lock:
            self._inflight[service_id] += delta
            count = max(self._inflight[service_id], 0)
        self.orchestrator.registry.set_inflight(service_id, count)

    async def handle_route(self, request: RouteRequest) -> RouteResponse:
        """
        Classify, select, dispatch and respond.

        Raises:
            InvalidProfileError: Unknown profile name (400)
            NoHealthyServiceError: No routable service (503)
            ColdStartTimeoutError: Cold service not ready in time (504)
            UpstreamError: The backend failed or timed out (502)
        """
        started = time.perf_counter()
        now = self.orchestrator.clock()
        request_id = request.request_id or uuid.uuid4().hex
        prompt = Prompt(id=request_id, text=request.prompt, arrival_time=now)
        decision: RoutingDecision | None = None
        backend_seconds = 0.0
        try:
            decision = self.orchestrator.route(
                prompt,
                profile=request.profile,
                mode=request.mode,
                strategy=self.config.selection.strategy,
                now=now,
            )
            logger.debug(
                f"Request {request_id} -> {decision.service_id} "
                f"({decision.classifier_output.predicted.value}, score {decision.score:.4f})"
            )
            self._track(decision.service_id, +1)
            dispatched = time.perf_counter()
            try:
                outcome = await dispatch(
                    decision,
                    prompt,
                    self.pool,
                    self.orchestrator,
                    self.config.cold_start_timeout,
                    now,
                )
            finally:
                backend_seconds = time.perf_counter() - dispatched
                self._track(decision.service_id, -1)
        except Exception as e:
            self._finish(request_id, status_for_error(e), decision, error=str(e))
            raise

        if not outcome.success:
            timed_out = (outcome.error or "").startswith("timeout")
            failure = UpstreamError(decision.service_id, outcome.error or "failed", timed_out)
            self._finish(request_id, status_for_error(failure), decision, outcome, outcome.error)
            raise failure

        self._finish(request_id, 200, decision, outcome)
        with self._lock:
            self._overheads_ms.append((time.perf_counter() - started - backend_seconds) * 1000)
        return self._response(request_id, decision, outcome)

    def _response(
        self, request_id: str, decision: RoutingDecision, outcome: InferenceOutcome
    ) -> RouteResponse:
        response = RouteResponse(
            request_id=request_id,
            completion=outcome.completion,
            ttft=outcome.ttft,
            latency=outcome.latency,
            cold_start=outcome.cold_start,
            cost=outcome.cost,
            streamed=outcome.streamed,
            output_tokens=outcome.output_tokens,
        )
        if not self.config.expose_routing_metadata:
            return response
        output = decision.classifier_output
        return response.model_copy(
            update={
                "service_id": decision.service_id,
                "tier": decision.tier,
                "complexity": output.predicted,
                "probabilities": list(output.probabilities),
                "components": decision.components.to_dict(),
                "score": decision.score,
                "profile": decision.profile.name,
            }
        )

    def set_health(self, service_id: str, health: HealthState) -> dict[str, object]:
        """
        Raises:
            ServiceNotFoundError: If the service is not registered
        """
        self.orchestrator.registry.set_health(service_id, health)
        return self.orchestrator.registry.get(service_id).to_dict()

    def registry_view(self) -> dict[str, object]:
        view = self.orchestrator.registry.summary()
        view["replica_states"] = [
            {
                "model_id": s.model_id,
                "current_replicas": s.current_replicas,
                "allocation": s.allocation(),
                "warm_floor": s.warm_floor,
                "last_scale_up_time": s.last_scale_up_time,
                "last_request_time": s.last_request_time,
            }
            for s in self.orchestrator.states
        ]
        return view

    def profiles_view(self) -> dict[str, object]:
        return {
            "default": self.orchestrator.default_profile,
            "profiles": [p.to_dict() for p in self.profiles.values()],
        }

    def metrics(self) -> dict[str, Any]:
        """Counters and percentiles read under one lock."""
        with self._lock:
            total, successes, failures = self._total, self._successes, self._failures
            statuses = dict(self._statuses)
            profiles = {
                name: {"total": count, "successes": self._profile_successes[name]}
                for name, count in sorted(self._profile_totals.items())
            }
            latencies = list(self._latencies)
            ttfts = list(self._ttfts)
            overheads = list(self._overheads_ms)
            log_entries = len(self.decision_log)
        return {
            "requests": {
                "total": total,
                "successes": successes,
                "failures": failures,
                "success_rate": successes / total if total else 0.0,
            },
            "status_counts": {str(k): v for k, v in sorted(statuses.items())},
            "profile_counts": profiles,
            "latency": _percentiles(latencies),
            "ttft": _percentiles(ttfts),
            "overhead_ms": {
                **_percentiles(overheads),
                "budget_p99": self.config.overhead_budget_ms,
            },
            "decision_log_entries": log_entries,
        }

    def scaling_step(self, now: float | None = None) -> int:
        """One scaling evaluation; commands go straight to the pool."""
        now = self.orchestrator.clock() if now is None else now
        self.orchestrator.tick(now)
        commands = self.orchestrator.drain_commands()
        for command in commands:
            self.pool.apply_scale(command, now)
        return len(commands)

    async def scaling_loop(self) -> None:
        period = self.orchestrator.policy.evaluation_period
        logger.info(f"Scaling loop started (every {period:.1f}s)")
        while True:
            try:
                self.scaling_step()
            except Exception:
                logger.error("Scaling evaluation failed", exc_info=True)
            await asyncio.sleep(period)

    async def aclose(self) -> None:
        if isinstance(self.pool, ProxyBackendPool):
            await self.pool.aclose()


def build_service(
    config: GatewayConfig,
    config_loader: ConfigLoader | None = None,
    pool: BackendPool | None = None,
) -> GatewayService:
    """
    Wire a gateway from its configuration.

    Args:
        config: Gateway configuration
        config_loader: Loader for the matrix, profiles and rule files
        pool: Backend pool override (built from ``config.mode`` if None)

    Returns:
        Ready-to-serve gateway service
    """
    factory = EngineFactory(config_loader)
    matrix = factory.config_loader.load_matrix_config(config.matrix)
    preset = config.cold_start_preset
    services = matrix.resolve(preset.seconds if preset else None)
    replicas = initial_replicas(matrix, services, config.policy, ScalingMode.DYNAMIC)
    registry = factory.create_registry(
        matrix,
        services,
        replicas,
        window_duration=max(config.policy.rate_window, DEFAULT_WINDOW_SECONDS),
        admission_control=False,
    )
    router = factory.create_router(config.routing)
    log_path = Path(config.decision_log) if config.decision_log else None
    decision_log = DecisionLog(
        log_path, keep_in_memory=log_path is None, max_entries=config.decision_log_memory
    )
    orchestrator = factory.create_orchestrator(
        registry,
        router,
        config.policy,
        config.selection,
        profiles=factory.load_profiles(config.profiles_file, required=False),
        decision_log=decision_log,
        seed=config.seed,
    )

    if pool is None:
        if config.mode == GatewayMode.PROXY:
            pool = ProxyBackendPool(
                services,
                request_timeout=config.request_timeout,
                max_output_tokens=config.max_output_tokens,
            )
        else:
            pool = SimulatedBackendPool(
                services,
                warm=[sid for sid, count in replicas.items() if count > 0],
                request_timeout=config.request_timeout,
                max_output_tokens=config.max_output_tokens,
            )
    logger.info(
        f"Gateway ready: {len(services)} services from {matrix.name}, mode {config.mode.value}"
    )
    return GatewayService(config, orchestrator, pool, services)
