"""Orchestration-aware scaling with warm pools and scale-to-zero."""

from __future__ import annotations

import math
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction

from pydantic import BaseModel, Field, model_validator

from llm_orchestrator.routing.types import ModelTier
from llm_orchestrator.utils.logging import get_logger

logger = get_logger(__name__)


class ScaleReason(str, Enum):
    """Why a scale command was issued."""

    SCALE_UP = "scale_up"
    IDLE_SCALE_DOWN = "idle_scale_down"
    WARM_FLOOR = "warm_floor"
    REBALANCE = "rebalance"


class ScalingPolicy(BaseModel):
    """Scaling loop parameters. Floors, cooldown and the replica cap apply per model."""

    evaluation_period: float = Field(default=10.0, gt=0, description="Seconds between ticks")
    cooldown: float = Field(default=60.0, ge=0, description="Minimum seconds between scale-ups")
    idle_threshold: float = Field(default=300.0, gt=0, description="Idle seconds before scale-down")
    rate_window: float = Field(default=300.0, gt=0, description="Request-rate telemetry window")
    warm_pool_by_tier: dict[ModelTier, int] = Field(
        default_factory=lambda: {ModelTier.SMALL: 1, ModelTier.MEDIUM: 1, ModelTier.LARGE: 0}
    )
    concurrency_per_replica: int = Field(default=4, ge=1)
    max_replicas_per_model: int = Field(default=8, ge=1)
    allow_cold_start: bool = True

    @model_validator(mode="after")
    def _check_floors(self) -> ScalingPolicy:
        for tier, floor in self.warm_pool_by_tier.items():
            if floor < 0:
                raise ValueError(f"Warm pool floor for {tier.value} must be non-negative")
            if floor > self.max_replicas_per_model:
                raise ValueError(
                    f"Warm pool floor {floor} for {tier.value} exceeds "
                    f"max_replicas_per_model {self.max_replicas_per_model}"
                )
        return self

    def warm_floor(self, tier: ModelTier, override: int | None = None) -> int:
        """Warm floor for a model; a per-model override wins over the tier default."""
        floor = self.warm_pool_by_tier.get(tier, 0) if override is None else override
        return min(floor, self.max_replicas_per_model)


@dataclass(frozen=True)
class Deployment:
    """Replicas of one matrix cell."""

    service_id: str
    replicas: int = 0
    concurrency_per_replica: int = 4

    def __post_init__(self) -> None:
        if self.replicas < 0:
            raise ValueError(f"Replica count of {self.service_id} must be non-negative")
        if self.concurrency_per_replica < 1:
            raise ValueError(f"Concurrency of {self.service_id} must be >= 1")


@dataclass(frozen=True)
class ReplicaState:
    """
    Replica bookkeeping for one model across its row of the matrix.

    The model's replica count is the sum over its deployments; the warm floor,
    cooldown and idle timer belong to the model.
    """

    model_id: str
    tier: ModelTier
    deployments: tuple[Deployment, ...] = ()
    target_replicas: int = 0
    warm_floor: int = 0
    last_scale_up_time: float | None = None
    last_request_time: float | None = None

    def __post_init__(self) -> None:
        if self.target_replicas < 0 or self.warm_floor < 0:
            raise ValueError("Replica counts must be non-negative")
        ids = [d.service_id for d in self.deployments]
        if len(set(ids)) != len(ids):
            raise ValueError(f"Duplicate deployment in model {self.model_id}: {ids}")

    @property
    def current_replicas(self) -> int:
        return sum(d.replicas for d in self.deployments)

    @property
    def service_ids(self) -> tuple[str, ...]:
        return tuple(d.service_id for d in self.deployments)

    def allocation(self) -> dict[str, int]:
        """Replicas per deployment, in row order."""
        return {d.service_id: d.replicas for d in self.deployments}

    def replicas_of(self, service_id: str) -> int:
        """
        Raises:
            KeyError: If the deployment is not in this model's row
        """
        return self.allocation()[service_id]

    def with_allocation(self, allocation: Mapping[str, int]) -> ReplicaState:
        """
        Copy with the given deployments set to new counts.

        Raises:
            KeyError: If a deployment is not in this model's row
        """
        unknown = set(allocation) - set(self.service_ids)
        if unknown:
            raise KeyError(f"Not deployments of {self.model_id}: {sorted(unknown)}")
        deployments = tuple(
            replace(d, replicas=allocation.get(d.service_id, d.replicas)) for d in self.deployments
        )
        return replace(self, deployments=deployments)


@dataclass(frozen=True)
class ScaleCommand:
    """
    Request to set a model's replica count.

    ``allocation`` lists the new count of every deployment that changes; the
    model's other deployments keep theirs.
    """

    model_id: str
    new_replica_count: int
    reason: ScaleReason
    issued_at: float
    allocation: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.new_replica_count < 0 or any(n < 0 for n in self.allocation.values()):
            raise ValueError("Replica counts must be non-negative")

    @property
    def service_ids(self) -> tuple[str, ...]:
        return tuple(self.allocation)

    def to_dict(self) -> dict[str, object]:
        return {
            "model_id": self.model_id,
            "new_replica_count": self.new_replica_count,
            "reason": self.reason.value,
            "issued_at": self.issued_at,
            "allocation": dict(self.allocation),
        }

    @classmethod
    def from_dict(cls, payload: Mapping[str, object]) -> ScaleCommand:
        allocation = payload.get("allocation") or {}
        return cls(
            model_id=str(payload["model_id"]),
            new_replica_count=int(payload["new_replica_count"]),  # type: ignore[call-overload]
            reason=ScaleReason(payload["reason"]),
            issued_at=float(payload["issued_at"]),  # type: ignore[arg-type]
            allocation={str(k): int(v) for k, v in allocation.items()},  # type: ignore[union-attr]
        )


@dataclass(frozen=True)
class Demand:
    """Measured load of one deployment."""

    request_rate: float
    latency: float


NO_DEMAND = Demand(0.0, 0.0)


def _check_load(rate: float, latency: float, concurrency: int) -> None:
    if concurrency < 1:
        raise ValueError(f"concurrency must be >= 1, got {concurrency}")
    if not (math.isfinite(rate) and math.isfinite(latency)) or rate < 0 or latency < 0:
        raise ValueError(f"rate and latency must be finite and non-negative, got {rate}, {latency}")


def plan_target(rate: float, latency: float, concurrency: int) -> int:
    """
    Replicas needed by Little's Law: ceil(rate * latency / concurrency).

    Evaluated in exact rational arithmetic over the float inputs.

    Args:
        rate: Requests per second
        latency: Mean latency in seconds
        concurrency: Concurrent requests per replica

    Returns:
        Target replica count

    Raises:
        ValueError: If inputs are negative, non-finite, or concurrency < 1
    """
    _check_load(rate, latency, concurrency)
    return math.ceil(Fraction(rate) * Fraction(latency) / concurrency)


def replica_need(load: Demand, concurrency: int) -> Fraction:
    """Fractional replicas a deployment's load occupies: rate * latency / concurrency."""
    _check_load(load.request_rate, load.latency, concurrency)
    return Fraction(load.request_rate) * Fraction(load.latency) / concurrency


def row_needs(state: ReplicaState, demand: Mapping[str, Demand]) -> dict[str, Fraction]:
    """Replica need of every deployment in the model's row (missing demand is none)."""
    return {
        d.service_id: replica_need(demand.get(d.service_id, NO_DEMAND), d.concurrency_per_replica)
        for d in state.deployments
    }


def row_demand(state: ReplicaState, demand: Mapping[str, Demand]) -> Demand:
    """The model's load: summed request rate and rate-weighted mean latency."""
    loads = [demand.get(sid, NO_DEMAND) for sid in state.service_ids]
    rate = sum(load.request_rate for load in loads)
    if rate <= 0:
        return NO_DEMAND
    return Demand(rate, sum(load.request_rate * load.latency for load in loads) / rate)


def row_target(state: ReplicaState, demand: Mapping[str, Demand]) -> int:
    """
    Little's-Law target for the whole row: ceil of the summed replica need.

    For a one-deployment row this is ``plan_target`` of that deployment.
    """
    return math.ceil(sum(row_needs(state, demand).values(), Fraction(0)))


def split_replicas(
    total: int, state: ReplicaState, needs: Mapping[str, Fraction] | None = None
) -> dict[str, int]:
    """
    Spread ``total`` replicas over the model's deployments, moving as few as possible.

    Starting from the current allocation, replicas are added one at a time to
    the deployment whose need most exceeds its count, or removed from the one
    whose count most exceeds its need. Ties add to the earlier deployment in
    the row and remove from the later one.

    Raises:
        ValueError: If ``total`` is negative or the model has no deployments
    """
    if total < 0:
        raise ValueError(f"total must be non-negative, got {total}")
    if not state.deployments:
        raise ValueError(f"Model {state.model_id} has no deployments")
    needs = needs or {}
    allocation = state.allocation()
    position = {sid: i for i, sid in enumerate(allocation)}

    def slack(sid: str) -> tuple[Fraction, int]:
        return (needs.get(sid, Fraction(0)) - allocation[sid], -position[sid])

    placed = sum(allocation.values())
    while placed < total:
        allocation[max(allocation, key=slack)] += 1
        placed += 1
    while placed > total:
        allocation[min((s for s in allocation if allocation[s] > 0), key=slack)] -= 1
        placed -= 1
    return allocation


def cooldown_expired(state: ReplicaState, policy: ScalingPolicy, now: float) -> bool:
    return state.last_scale_up_time is None or now - state.last_scale_up_time >= policy.cooldown


def is_idle(state: ReplicaState, policy: ScalingPolicy, now: float) -> bool:
    """A model that never saw a request on any of its deployments is idle."""
    return state.last_request_time is None or now - state.last_request_time > policy.idle_threshold


def scaling_tick(
    states: Iterable[ReplicaState],
    demand: Mapping[str, Demand],
    policy: ScalingPolicy,
    now: float,
) -> list[ScaleCommand]:
    """
    One evaluation of the scaling loop.

    For each model: scale up to max(target, floor) when the row's Little's-Law
    demand exceeds the model's replica count and its cooldown has expired;
    otherwise scale an idle model straight to its warm floor; otherwise top up
    a model that sits below its floor. Targets are capped at
    ``max_replicas_per_model`` and split across the row by ``split_replicas``.
    Commands that would not change the model's count are not emitted, so a
    model gets at most one command per tick.

    Args:
        states: Replica state per model
        demand: Measured rate and latency per service id (missing means no demand)
        policy: Scaling policy
        now: Evaluation time

    Returns:
        Scale commands, in input order
    """
    commands: list[ScaleCommand] = []
    cap = policy.max_replicas_per_model
    for state in states:
        if not state.deployments:
            continue
        needs = row_needs(state, demand)
        target = min(math.ceil(sum(needs.values(), Fraction(0))), cap)
        current = state.current_replicas

        new_count: int | None = None
        reason = ScaleReason.SCALE_UP
        if target > current and cooldown_expired(state, policy, now):
            new_count = min(max(target, state.warm_floor), cap)
        elif is_idle(state, policy, now):
            new_count = max(0, state.warm_floor)
            reason = ScaleReason.IDLE_SCALE_DOWN if new_count < current else ScaleReason.WARM_FLOOR
        elif current < state.warm_floor:
            new_count = state.warm_floor
            reason = ScaleReason.WARM_FLOOR

        if new_count is None or new_count == current:
            continue
        allocation = split_replicas(new_count, state, needs)
        changed = {
            sid: count for sid, count in allocation.items() if count != state.replicas_of(sid)
        }
        commands.append(ScaleCommand(state.model_id, new_count, reason, now, changed))
        load = row_demand(state, demand)
        logger.debug(
            f"Tick {now:.1f}: {state.model_id} {current} -> {new_count} ({reason.value}, "
            f"target={target}, rate={load.request_rate:.2f}/s, latency={load.latency:.2f}s)"
        )
    return commands


def active_set(states: Iterable[ReplicaState]) -> set[str]:
    """Models with at least one replica."""
    return {s.model_id for s in states if s.current_replicas > 0}
