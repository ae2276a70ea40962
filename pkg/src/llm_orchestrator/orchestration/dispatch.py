"""Execute a routing decision against a backend pool."""

from __future__ import annotations

from dataclasses import replace
from typing import Protocol

from llm_orchestrator.errors import ColdStartTimeoutError
from llm_orchestrator.orchestration.orchestrator import Orchestrator
from llm_orchestrator.orchestration.outcome import InferenceOutcome
from llm_orchestrator.orchestration.scaling import ScaleCommand
from llm_orchestrator.orchestration.selection import RoutingDecision
from llm_orchestrator.routing import Prompt
from llm_orchestrator.utils.logging import get_logger

logger = get_logger(__name__)

DEFAULT_COLD_START_TIMEOUT = 60.0


class BackendPool(Protocol):
    """What ``dispatch`` needs from a pool of inference backends."""

    def apply_scale(self, command: ScaleCommand, time: float) -> object:
        """Act on a scale command issued at ``time``."""

    async def wait_ready(self, service_id: str, timeout: float) -> float:
        """Wait until the service can serve and return the seconds waited."""

    async def invoke(self, service_id: str, prompt: Prompt) -> InferenceOutcome:
        """Run one request. Backend failures come back as unsuccessful outcomes."""


async def dispatch(
    decision: RoutingDecision,
    prompt: Prompt,
    pool: BackendPool,
    orchestrator: Orchestrator,
    cold_start_timeout: float = DEFAULT_COLD_START_TIMEOUT,
    now: float | None = None,
) -> InferenceOutcome:
    """
    Run ``prompt`` on the decided service and feed the result to telemetry.

    A cold decision first activates the deployment through the orchestrator's
    command queue and waits for readiness; the wait is added to TTFT and
    latency.

    Args:
        decision: Routing decision
        prompt: Prompt to run
        pool: Backend pool
        orchestrator: Orchestrator owning replica state and telemetry
        cold_start_timeout: Upper bound on the readiness wait in seconds
        now: Request start time

    Returns:
        The inference outcome (failed backends yield ``success=False``)

    Raises:
        ColdStartTimeoutError: If the service did not become ready in time
    """
    now = orchestrator.clock() if now is None else now
    service_id = decision.service_id
    waited = 0.0

    if decision.cold_start:
        orchestrator.request_activation(service_id, now)
        for command in orchestrator.drain_commands():
            pool.apply_scale(command, now)
        try:
            waited = await pool.wait_ready(service_id, cold_start_timeout)
        except ColdStartTimeoutError as e:
            logger.error(f"Cold start of {service_id} timed out after {e.waited:.1f}s")
            orchestrator.record_outcome(
                InferenceOutcome(
                    prompt_id=prompt.id,
                    service_id=service_id,
                    success=False,
                    arrival_time=now,
                    latency=e.waited,
                    cold_start=True,
                    error=str(e),
                )
            )
            raise

    outcome = await pool.invoke(service_id, prompt)
    outcome = replace(
        outcome,
        arrival_time=now,
        ttft=None if outcome.ttft is None else outcome.ttft + waited,
        latency=None if outcome.latency is None else outcome.latency + waited,
        cold_start=decision.cold_start,
    )
    if not outcome.success:
        logger.error(f"Request {prompt.id} failed on {service_id}: {outcome.error}")
    orchestrator.record_outcome(outcome)
    return outcome
