"""Discrete-event simulator of the backend pool and the closed routing loop."""

from llm_orchestrator.simulation.arrivals import (
    bursty_offsets,
    fixed_rate_offsets,
    generate_trace,
    poisson_offsets,
)
from llm_orchestrator.simulation.backend import ReplicaStatus, SimBackendPool
from llm_orchestrator.simulation.engine import ServiceReport, SimReport, Simulation, run
from llm_orchestrator.simulation.events import EventKind, SimClock, SimEvent

__all__ = [
    "EventKind",
    "ReplicaStatus",
    "ServiceReport",
    "SimBackendPool",
    "SimClock",
    "SimEvent",
    "SimReport",
    "Simulation",
    "bursty_offsets",
    "fixed_rate_offsets",
    "generate_trace",
    "poisson_offsets",
    "run",
]
