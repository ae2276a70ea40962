"""The orchestrator: routes requests and runs the scaling loop against a registry."""

from __future__ import annotations

import threading
import time
from collections import deque
from collections.abc import Callable, Mapping
from dataclasses import replace

import numpy as np

from llm_orchestrator.errors import InvalidProfileError
from llm_orchestrator.orchestration.decision_log import DecisionLog
from llm_orchestrator.orchestration.outcome import InferenceOutcome
from llm_orchestrator.orchestration.scaling import (
    Demand,
    Deployment,
    ReplicaState,
    ScaleCommand,
    ScaleReason,
    ScalingPolicy,
    active_set,
    cooldown_expired,
    row_demand,
    scaling_tick,
)
from llm_orchestrator.orchestration.selection import (
    RoutingDecision,
    SelectionOptions,
    SelectionStrategy,
    select_service,
)
from llm_orchestrator.registry import ServiceRegistry
from llm_orchestrator.routing import ComplexityRouter, Prompt, RoutingMode
from llm_orchestrator.scoring import DEFAULT_PROFILES, WeightProfile
from llm_orchestrator.utils.logging import get_logger

logger = get_logger(__name__)


class Orchestrator:
    """
    Ties the router, registry and scaling policy together.

    Replica state is kept per model over its row of deployments. Scale
    commands (from the scaling loop and from cold-start activations) are
    applied to replica state and the registry when issued, then queued for the
    backend pool, which drains them in order with ``drain_commands``.
    """

    def __init__(
        self,
        registry: ServiceRegistry,
        router: ComplexityRouter | None = None,
        policy: ScalingPolicy | None = None,
        profiles: Mapping[str, WeightProfile] | None = None,
        default_profile: str = "balanced",
        options: SelectionOptions | None = None,
        decision_log: DecisionLog | None = None,
        seed: int | None = None,
        clock: Callable[[], float] = time.time,
    ) -> None:
        self.registry = registry
        self.router = router or ComplexityRouter()
        self.policy = policy or ScalingPolicy()
        self.profiles = dict(profiles or DEFAULT_PROFILES)
        self.options = options or SelectionOptions(allow_cold=self.policy.allow_cold_start)
        self.decision_log = decision_log or DecisionLog()
        self.clock = clock
        self._rng = np.random.default_rng(seed)
        self._states: dict[str, ReplicaState] = {}
        self._model_of: dict[str, str] = {}
        self._commands: deque[ScaleCommand] = deque()
        self._lock = threading.RLock()
        if default_profile not in self.profiles:
            raise InvalidProfileError(
                f"Unknown default profile '{default_profile}'. Known: {sorted(self.profiles)}"
            )
        self.default_profile = default_profile
        self.sync_states()

    def sync_states(self) -> None:
        """Add every registered deployment not yet tracked to its model's row."""
        snapshot = self.registry.snapshot()
        with self._lock:
            for instance in snapshot:
                if instance.service_id in self._model_of:
                    continue
                model = snapshot.models[instance.model_id]
                state = self._states.get(instance.model_id) or ReplicaState(
                    model_id=instance.model_id,
                    tier=instance.tier,
                    warm_floor=self.policy.warm_floor(instance.tier, model.warm_pool_floor),
                )
                deployment = Deployment(
                    instance.service_id, instance.replicas, instance.concurrency_per_replica
                )
                self._states[instance.model_id] = replace(
                    state,
                    deployments=state.deployments + (deployment,),
                    target_replicas=state.target_replicas + instance.replicas,
                )
                self._model_of[instance.service_id] = instance.model_id

    @property
    def states(self) -> tuple[ReplicaState, ...]:
        with self._lock:
            return tuple(self._states.values())

    def state(self, model_id: str) -> ReplicaState:
        return self._states[model_id]

    def state_of(self, service_id: str) -> ReplicaState:
        """Replica state of the model serving ``service_id``."""
        return self._states[self._model_of[service_id]]

    def active_models(self) -> set[str]:
        return active_set(self.states)

    def active_services(self) -> set[str]:
        return {d.service_id for s in self.states for d in s.deployments if d.replicas > 0}

    def resolve_profile(self, name: str | None) -> WeightProfile:
        """
        Raises:
            InvalidProfileError: If the profile name is unknown
        """
        key = name or self.default_profile
        try:
            return self.profiles[key]
        except KeyError:
            raise InvalidProfileError(
                f"Unknown profile '{key}'. Known profiles: {', '.join(sorted(self.profiles))}"
            ) from None

    def route(
        self,
        prompt: Prompt,
        profile: str | None = None,
        mode: RoutingMode | None = None,
        strategy: SelectionStrategy = SelectionStrategy.MULTI_OBJECTIVE,
        now: float | None = None,
    ) -> RoutingDecision:
        """
        Classify and select a service for ``prompt``, counting the request.

        Raises:
            InvalidProfileError: If the profile name is unknown
            NoHealthyServiceError: If no candidate is eligible
        """
        now = self.clock() if now is None else now
        weights = self.resolve_profile(profile)
        output = self.router.classify(prompt, mode)
        decision = select_service(
            prompt,
            self.registry.snapshot(),
            weights,
            output,
            self.router.relevance_table,
            self.options,
            strategy,
            self._rng,
            now,
        )
        self.registry.record_request(decision.service_id, now)
        with self._lock:
            model_id = self._model_of.get(decision.service_id)
            if model_id is not None:
                state = self._states[model_id]
                self._states[model_id] = replace(state, last_request_time=now)
        return decision

    def request_activation(self, service_id: str, now: float | None = None) -> ScaleCommand | None:
        """
        Give a zero-replica deployment a replica for a cold start.

        When the model has no replicas anywhere, or sits below its cap with an
        expired cooldown, it grows by a scale-up that restarts the cooldown.
        Otherwise one replica moves over from the model's fullest other
        deployment, leaving the model's count and cooldown as they are.

        Returns:
            The issued command, or None if the deployment already has replicas
        """
        now = self.clock() if now is None else now
        cap = self.policy.max_replicas_per_model
        with self._lock:
            state = self.state_of(service_id)
            if state.replicas_of(service_id) > 0:
                return None
            current = state.current_replicas
            if current == 0 or (current < cap and cooldown_expired(state, self.policy, now)):
                count = min(max(1, state.warm_floor - current), cap - current)
                command = ScaleCommand(
                    state.model_id,
                    current + count,
                    ScaleReason.SCALE_UP,
                    now,
                    {service_id: count},
                )
            else:
                order = {sid: i for i, sid in enumerate(state.service_ids)}
                donor = max(
                    (d for d in state.deployments if d.replicas > 0),
                    key=lambda d: (d.replicas, order[d.service_id]),
                )
                command = ScaleCommand(
                    state.model_id,
                    current,
                    ScaleReason.REBALANCE,
                    now,
                    {donor.service_id: donor.replicas - 1, service_id: 1},
                )
            self.issue(command)
        logger.info(f"Cold start of {service_id} at {now:.1f} ({command.reason.value})")
        return command

    def measure_demand(self, now: float | None = None) -> dict[str, Demand]:
        """Rate and latency per deployment; the scaling loop sums them per model."""
        now = self.clock() if now is None else now
        window = self.policy.rate_window
        return {
            service_id: Demand(
                request_rate=self.registry.get_avg_request_rate(service_id, window, now),
                latency=self.registry.get_avg_latency(service_id),
            )
            for service_id in self._model_of
        }

    def model_demand(self, now: float | None = None) -> dict[str, Demand]:
        """Row-aggregated load per model."""
        demand = self.measure_demand(now)
        return {state.model_id: row_demand(state, demand) for state in self.states}

    def tick(self, now: float | None = None) -> list[ScaleCommand]:
        """Run one scaling evaluation and issue the resulting commands."""
        now = self.clock() if now is None else now
        commands = scaling_tick(self.states, self.measure_demand(now), self.policy, now)
        for command in commands:
            self.issue(command)
        return commands

    def issue(self, command: ScaleCommand) -> None:
        """
        Apply ``command`` to replica state and the registry, then queue it for the pool.

        Raises:
            ValueError: If the allocation does not add up to the new model count
        """
        with self._lock:
            state = self._states[command.model_id]
            updated = state.with_allocation(command.allocation)
            if updated.current_replicas != command.new_replica_count:
                raise ValueError(
                    f"Allocation {dict(command.allocation)} of {command.model_id} sums to "
                    f"{updated.current_replicas}, not {command.new_replica_count}"
                )
            last_up = state.last_scale_up_time
            if command.reason == ScaleReason.SCALE_UP:
                last_up = command.issued_at
            self._states[command.model_id] = replace(
                updated,
                target_replicas=command.new_replica_count,
                last_scale_up_time=last_up,
            )
            for service_id, count in command.allocation.items():
                self.registry.set_replicas(service_id, count)
            self._commands.append(command)
        logger.info(
            f"Scale {command.model_id}: {state.current_replicas} -> "
            f"{command.new_replica_count} ({command.reason.value}) {dict(command.allocation)}"
        )

    def drain_commands(self) -> list[ScaleCommand]:
        with self._lock:
            commands = list(self._commands)
            self._commands.clear()
        return commands

    def record_outcome(self, outcome: InferenceOutcome, timestamp: float | None = None) -> None:
        """Feed a finished request into telemetry."""
        if outcome.service_id is None or outcome.in_flight or outcome.latency is None:
            return
        self.registry.record_sample(
            outcome.service_id,
            latency=outcome.latency,
            ttft=outcome.ttft if outcome.ttft is not None else outcome.latency,
            success=bool(outcome.success),
            timestamp=outcome.finished_at if timestamp is None else timestamp,
            cost=outcome.cost,
        )
