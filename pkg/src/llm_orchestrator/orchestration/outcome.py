"""Per-request inference outcome shared by the simulator, gateway and harness."""

from __future__ import annotations

from dataclasses import asdict, dataclass


@dataclass(frozen=True)
class InferenceOutcome:
    """
    Result of one routed request.

    ``success`` is None for a request still in flight when a simulation ended.
    ``accuracy`` is the routing-success credit: the success flag times the
    relevance of the chosen tier for the prompt's labeled complexity.
    """

    prompt_id: str
    service_id: str | None
    success: bool | None
    arrival_time: float = 0.0
    ttft: float | None = None
    latency: float | None = None
    cost: float = 0.0
    cold_start: bool = False
    completion: str = ""
    error: str | None = None
    output_tokens: int = 0
    accuracy: float = 0.0
    streamed: bool = True
    benchmark_tag: str | None = None

    @property
    def in_flight(self) -> bool:
        return self.success is None

    @property
    def finished_at(self) -> float | None:
        return None if self.latency is None else self.arrival_time + self.latency

    def to_dict(self) -> dict[str, object]:
        return asdict(self)
