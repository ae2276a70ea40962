"""Scaling loop, matrix selection and dispatch."""

from llm_orchestrator.orchestration.decision_log import DecisionLog
from llm_orchestrator.orchestration.dispatch import (
    DEFAULT_COLD_START_TIMEOUT,
    BackendPool,
    dispatch,
)
from llm_orchestrator.orchestration.orchestrator import Orchestrator
from llm_orchestrator.orchestration.outcome import InferenceOutcome
from llm_orchestrator.orchestration.scaling import (
    Demand,
    Deployment,
    ReplicaState,
    ScaleCommand,
    ScaleReason,
    ScalingPolicy,
    active_set,
    plan_target,
    row_demand,
    row_target,
    scaling_tick,
    split_replicas,
)
from llm_orchestrator.orchestration.selection import (
    LATENCY_ONLY_PROFILE,
    RoutingDecision,
    SelectionOptions,
    SelectionStrategy,
    decision_is_consistent,
    recompute_score,
    score_candidates,
    select_service,
)

__all__ = [
    "BackendPool",
    "DEFAULT_COLD_START_TIMEOUT",
    "DecisionLog",
    "Demand",
    "Deployment",
    "InferenceOutcome",
    "LATENCY_ONLY_PROFILE",
    "Orchestrator",
    "ReplicaState",
    "RoutingDecision",
    "ScaleCommand",
    "ScaleReason",
    "ScalingPolicy",
    "SelectionOptions",
    "SelectionStrategy",
    "active_set",
    "decision_is_consistent",
    "dispatch",
    "plan_target",
    "recompute_score",
    "row_demand",
    "row_target",
    "scaling_tick",
    "score_candidates",
    "select_service",
    "split_replicas",
]
