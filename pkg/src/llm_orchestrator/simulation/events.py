"""Event queue and clock of the discrete-event simulator."""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

from llm_orchestrator.errors import SimulationConfigError


class EventKind(str, Enum):
    """Simulator event kinds, listed in same-instant processing order."""

    COMPLETION = "completion"
    FAILURE = "failure"
    REPLICA_READY = "replica_ready"
    SCALE_APPLIED = "scale_applied"
    FIRST_TOKEN = "first_token"
    SCALING_TICK = "scaling_tick"
    ARRIVAL = "arrival"

    @property
    def rank(self) -> int:
        return _KIND_ORDER[self]


_KIND_ORDER = {kind: i for i, kind in enumerate(EventKind)}


@dataclass(frozen=True)
class SimEvent:
    """A scheduled event. Ordered by (time, kind rank, sequence number)."""

    time: float
    kind: EventKind
    seq: int
    payload: dict[str, Any] = field(default_factory=dict)

    @property
    def sort_key(self) -> tuple[float, int, int]:
        return (self.time, self.kind.rank, self.seq)

    def to_dict(self) -> dict[str, Any]:
        return {"time": self.time, "kind": self.kind.value, "seq": self.seq, **self.payload}


class SimClock:
    """
    Simulated time plus the pending-event priority queue.

    Time never decreases: scheduling an event in the past is an error.
    """

    def __init__(self, rng_seed: int = 0) -> None:
        self.current_time = 0.0
        self.rng_seed = rng_seed
        self._queue: list[tuple[tuple[float, int, int], SimEvent]] = []
        self._seq = 0

    def __len__(self) -> int:
        return len(self._queue)

    def schedule(self, time: float, kind: EventKind, **payload: Any) -> SimEvent:
        if time < self.current_time:
            raise SimulationConfigError(
                f"Cannot schedule {kind.value} at {time} before current time {self.current_time}"
            )
        event = SimEvent(time, kind, self._seq, payload)
        self._seq += 1
        heapq.heappush(self._queue, (event.sort_key, event))
        return event

    def peek(self) -> SimEvent | None:
        return self._queue[0][1] if self._queue else None

    def pop(self) -> SimEvent:
        _, event = heapq.heappop(self._queue)
        self.current_time = event.time
        return event

    def advance_to(self, time: float) -> None:
        if time < self.current_time:
            raise SimulationConfigError(
                f"Clock cannot move back from {self.current_time} to {time}"
            )
        self.current_time = time
