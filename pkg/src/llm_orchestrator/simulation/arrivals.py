"""Arrival processes that turn a scenario's arrival block into a trace."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from llm_orchestrator.bench.traces import TraceRecord, build_trace, read_trace
from llm_orchestrator.config.models import ArrivalConfig, ArrivalKind
from llm_orchestrator.utils.logging import get_logger

logger = get_logger(__name__)


def fixed_rate_offsets(rate: float, horizon: float, count: int | None = None) -> list[float]:
    """Evenly spaced arrivals at ``rate`` per second, starting at 0."""
    if rate <= 0:
        raise ValueError(f"Arrival rate must be positive, got {rate}")
    offsets = []
    i = 0
    while count is None or i < count:
        t = i / rate
        if count is None and t >= horizon:
            break
        offsets.append(t)
        i += 1
    return offsets


def poisson_offsets(
    rate: float, horizon: float, rng: np.random.Generator, count: int | None = None
) -> list[float]:
    """
    Poisson arrivals: exponential gaps with mean 1/rate.

    With ``count`` the process runs until that many arrivals, otherwise until
    ``horizon``.
    """
    if rate <= 0:
        raise ValueError(f"Arrival rate must be positive, got {rate}")
    offsets = []
    t = 0.0
    while True:
        t += float(rng.exponential(1.0 / rate))
        if count is None and t >= horizon:
            break
        offsets.append(t)
        if count is not None and len(offsets) >= count:
            break
    return offsets


def bursty_offsets(
    rate: float,
    burst_duration: float,
    idle_gap: float,
    bursts: int,
    rng: np.random.Generator,
) -> list[float]:
    """Poisson bursts of ``burst_duration`` seconds separated by silent ``idle_gap`` seconds."""
    offsets = []
    period = burst_duration + idle_gap
    for k in range(bursts):
        start = k * period
        t = start
        while True:
            t += float(rng.exponential(1.0 / rate))
            if t >= start + burst_duration:
                break
            offsets.append(t)
    return offsets


def generate_trace(
    config: ArrivalConfig,
    horizon: float,
    seed: int,
    base_path: Path | None = None,
) -> list[TraceRecord]:
    """
    Build the trace of a scenario.

    Arrival times and prompt contents draw from independent child streams of
    ``seed``, so changing the prompt mix leaves arrival times untouched.

    Args:
        config: Arrival block of the scenario
        horizon: Simulation horizon in seconds
        seed: Scenario seed
        base_path: Directory that relative replay paths resolve against

    Returns:
        Trace records ordered by arrival offset
    """
    if config.kind == ArrivalKind.REPLAY:
        path = Path(config.trace_file or "")
        if not path.is_absolute() and base_path is not None:
            path = base_path / path
        records = read_trace(path)
        if config.count is not None:
            records = records[: config.count]
        logger.info(f"Replaying {len(records)} prompts from {path}")
        return records

    arrival_seq, prompt_seq = np.random.SeedSequence(seed).spawn(2)
    arrival_rng = np.random.default_rng(arrival_seq)
    if config.kind == ArrivalKind.FIXED:
        offsets = fixed_rate_offsets(config.rate, horizon, config.count)
    elif config.kind == ArrivalKind.POISSON:
        offsets = poisson_offsets(config.rate, horizon, arrival_rng, config.count)
    else:
        offsets = bursty_offsets(
            config.rate, config.burst_duration, config.idle_gap, config.bursts, arrival_rng
        )
        if config.count is not None:
            offsets = offsets[: config.count]

    records = build_trace(offsets, np.random.default_rng(prompt_seq), config.complexity_mix)
    logger.info(f"Generated {len(records)} {config.kind.value} arrivals")
    return records
