"""Service registry: the live model x backend matrix and its telemetry."""

from __future__ import annotations

import threading
import time
from collections.abc import Iterator, Mapping
from dataclasses import dataclass, field, replace
from types import MappingProxyType

from llm_orchestrator.errors import ConflictError, ContractViolationError, ServiceNotFoundError
from llm_orchestrator.registry.models import (
    BackendSpec,
    HealthState,
    ModelSpec,
    ServiceInstance,
    make_service_id,
)
from llm_orchestrator.registry.telemetry import (
    DEFAULT_WINDOW_SECONDS,
    TelemetrySample,
    TelemetryWindow,
)
from llm_orchestrator.utils.logging import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class RegistrySnapshot:
    """Immutable view of the matrix at one registry version."""

    version: int
    instances: tuple[ServiceInstance, ...] = ()
    models: Mapping[str, ModelSpec] = field(default_factory=lambda: MappingProxyType({}))
    backends: Mapping[str, BackendSpec] = field(default_factory=lambda: MappingProxyType({}))

    def __iter__(self) -> Iterator[ServiceInstance]:
        return iter(self.instances)

    def __len__(self) -> int:
        return len(self.instances)

    def get(self, service_id: str) -> ServiceInstance:
        for instance in self.instances:
            if instance.service_id == service_id:
                return instance
        raise ServiceNotFoundError(service_id)

    def by_model(self, model_id: str) -> list[ServiceInstance]:
        return [i for i in self.instances if i.model_id == model_id]


def healthy_candidates(
    snapshot: RegistrySnapshot,
    allow_cold: bool = True,
    include_degraded: bool = False,
) -> list[ServiceInstance]:
    """
    Instances eligible for routing.

    Args:
        snapshot: Registry snapshot
        allow_cold: Whether zero-replica instances may be chosen (they are then
            activated through a cold start; check ``instance.is_cold``)
        include_degraded: Also accept Degraded instances

    Returns:
        Eligible instances in registration order
    """
    accepted = {HealthState.HEALTHY}
    if include_degraded:
        accepted.add(HealthState.DEGRADED)
    return [
        i
        for i in snapshot.instances
        if i.health in accepted and (i.replicas > 0 or allow_cold)
    ]


class ServiceRegistry:
    """
    Owns the service matrix and per-service telemetry windows.

    Writers are serialized by a lock; readers take ``snapshot()``, which is
    rebuilt lazily after writes and never mutates once published.
    """

    def __init__(
        self,
        window_duration: float = DEFAULT_WINDOW_SECONDS,
        admission_control: bool = True,
    ) -> None:
        self.window_duration = window_duration
        self.admission_control = admission_control
        self._models: dict[str, ModelSpec] = {}
        self._backends: dict[str, BackendSpec] = {}
        self._instances: dict[str, ServiceInstance] = {}
        self._windows: dict[str, TelemetryWindow] = {}
        self._lock = threading.RLock()
        self._version = 0
        self._snapshot: RegistrySnapshot | None = None

    @property
    def version(self) -> int:
        return self._version

    def __contains__(self, service_id: object) -> bool:
        return service_id in self._instances

    def __len__(self) -> int:
        return len(self._instances)

    def register(self, model: ModelSpec, backend: BackendSpec, instance: ServiceInstance) -> str:
        """
        Add a matrix cell.

        Args:
            model: Model metadata (its tier is copied onto the instance)
            backend: Backend metadata
            instance: Initial instance state

        Returns:
            The service id

        Raises:
            ConflictError: If the (model, backend) pair is already registered
            ValueError: If the instance ids do not match the specs
        """
        if instance.model_id != model.model_id or instance.backend_id != backend.backend_id:
            raise ValueError(
                f"Instance {instance.service_id} does not match "
                f"{model.model_id}/{backend.backend_id}"
            )
        service_id = make_service_id(model.model_id, backend.backend_id)
        with self._lock:
            if service_id in self._instances:
                raise ConflictError(f"Service '{service_id}' is already registered")
            known = self._models.get(model.model_id)
            if known is not None and known != model:
                raise ConflictError(f"Model '{model.model_id}' registered with different specs")
            self._models[model.model_id] = model
            self._backends.setdefault(backend.backend_id, backend)
            self._windows[service_id] = TelemetryWindow(self.window_duration)
            self._instances[service_id] = replace(
                instance, tier=model.tier, service_id=service_id
            )
            self._publish()
        logger.info(f"Registered service {service_id} (tier={model.tier.value})")
        return service_id

    def snapshot(self) -> RegistrySnapshot:
        snap = self._snapshot
        if snap is not None:
            return snap
        with self._lock:
            if self._snapshot is None:
                self._snapshot = RegistrySnapshot(
                    version=self._version,
                    instances=tuple(self._instances.values()),
                    models=MappingProxyType(dict(self._models)),
                    backends=MappingProxyType(dict(self._backends)),
                )
            return self._snapshot

    def get(self, service_id: str) -> ServiceInstance:
        try:
            return self._instances[service_id]
        except KeyError:
            raise ServiceNotFoundError(service_id) from None

    def model(self, model_id: str) -> ModelSpec:
        return self._models[model_id]

    def record_request(self, service_id: str, timestamp: float | None = None) -> None:
        """Count a request routed to ``service_id`` (feeds the request rate)."""
        window = self._window(service_id)
        with self._lock:
            before = len(window)
            window.add_request(time.time() if timestamp is None else timestamp)
            if len(window) != before:
                self._refresh(service_id)

    def record_sample(
        self,
        service_id: str,
        latency: float,
        ttft: float,
        success: bool,
        timestamp: float | None = None,
        cost: float | None = None,
    ) -> None:
        """
        Append a completion sample and refresh the instance's stats.

        Args:
            service_id: Service that handled the request
            latency: End-to-end latency in seconds
            ttft: Time to first token in seconds
            success: Whether the request completed validly
            timestamp: Completion time (defaults to now)
            cost: Cost of the request (defaults to the instance unit cost)

        Raises:
            ServiceNotFoundError: If the service is unknown
        """
        window = self._window(service_id)
        with self._lock:
            instance = self._instances[service_id]
            window.add_sample(
                TelemetrySample(
                    timestamp=time.time() if timestamp is None else timestamp,
                    latency=latency,
                    ttft=ttft,
                    success=success,
                    cost=instance.unit_cost if cost is None else cost,
                )
            )
            self._refresh(service_id)

    def get_avg_request_rate(
        self, service_id: str, window: float | None = None, now: float | None = None
    ) -> float:
        """Requests per second over the last ``window`` seconds (0 when empty)."""
        return self._window(service_id).request_rate(window, now)

    def get_avg_latency(self, service_id: str) -> float:
        """Mean latency of successful samples, or the configured prior without samples."""
        mean = self._window(service_id).mean_success_latency()
        return self.get(service_id).latency_prior if mean is None else mean

    def model_request_rate(
        self, model_id: str, window: float | None = None, now: float | None = None
    ) -> float:
        """Request rate summed over every backend serving ``model_id``."""
        return sum(
            self.get_avg_request_rate(i.service_id, window, now)
            for i in self._instances.values()
            if i.model_id == model_id
        )

    def telemetry(self, service_id: str) -> TelemetryWindow:
        return self._window(service_id)

    def set_health(self, service_id: str, health: HealthState) -> None:
        self._update(service_id, health=health)
        logger.info(f"Service {service_id} health set to {health.value}")

    def set_replicas(self, service_id: str, replicas: int) -> None:
        if replicas < 0:
            raise ValueError("replicas must be non-negative")
        self._update(service_id, replicas=replicas)

    def set_inflight(self, service_id: str, inflight: int) -> None:
        """
        Raises:
            ContractViolationError: If admission control is on and the count
                exceeds replicas * concurrency
        """
        instance = self.get(service_id)
        if inflight < 0:
            raise ValueError("inflight must be non-negative")
        if self.admission_control and inflight > instance.capacity:
            raise ContractViolationError(
                f"{service_id}: inflight {inflight} exceeds capacity {instance.capacity}"
            )
        self._update(service_id, inflight=inflight)

    def summary(self) -> dict[str, object]:
        """JSON-ready view of the matrix and telemetry."""
        snap = self.snapshot()
        cells = []
        for instance in snap.instances:
            window = self._windows[instance.service_id]
            successes, failures = window.success_counts()
            cell = instance.to_dict()
            cell["telemetry"] = {
                "request_rate": window.request_rate(),
                "avg_latency": self.get_avg_latency(instance.service_id),
                "successes": successes,
                "failures": failures,
            }
            cells.append(cell)
        return {
            "version": snap.version,
            "models": [m.model_dump(mode="json") for m in snap.models.values()],
            "backends": [b.model_dump(mode="json") for b in snap.backends.values()],
            "cells": cells,
        }

    def _window(self, service_id: str) -> TelemetryWindow:
        try:
            return self._windows[service_id]
        except KeyError:
            raise ServiceNotFoundError(service_id) from None

    def _update(self, service_id: str, **changes: object) -> None:
        with self._lock:
            instance = self.get(service_id)
            self._instances[service_id] = replace(instance, **changes)  # type: ignore[arg-type]
            self._publish()

    def _refresh(self, service_id: str) -> None:
        window = self._windows[service_id]
        self._instances[service_id] = replace(
            self._instances[service_id],
            latency_stats=window.latency_stats(),
            cost_stats=window.cost_stats(),
            mean_latency=window.mean_success_latency(),
        )
        self._publish()

    def _publish(self) -> None:
        self._version += 1
        self._snapshot = None
