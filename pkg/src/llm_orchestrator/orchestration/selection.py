"""Matrix selection: score every eligible cell and pick the best."""

from __future__ import annotations

import math
import time
from collections.abc import Sequence
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from llm_orchestrator.errors import NoHealthyServiceError
from llm_orchestrator.registry import RegistrySnapshot, ServiceInstance, healthy_candidates
from llm_orchestrator.routing import ClassifierOutput, Prompt, RelevanceTable, relevance
from llm_orchestrator.scoring import (
    Candidate,
    NormalizationScope,
    NormalizationStats,
    ScoreComponents,
    ScoringMode,
    WeightProfile,
    legacy_score,
    normalize_metric,
    pick_max,
    pool_stats,
    score,
)
from llm_orchestrator.utils.logging import get_logger

logger = get_logger(__name__)

LATENCY_ONLY_PROFILE = WeightProfile(name="latency_only", alpha=0.0, lam=1.0, mu=0.0)


class SelectionStrategy(str, Enum):
    """How a cell is chosen among eligible candidates."""

    RANDOM = "random"
    LATENCY_ONLY = "latency_only"
    MULTI_OBJECTIVE = "multi_objective"


@dataclass(frozen=True)
class SelectionOptions:
    """Knobs for ``select_service``."""

    scope: NormalizationScope = NormalizationScope.MATRIX
    mode: ScoringMode = ScoringMode.NORMALIZED
    cold_start_surcharge: bool = True
    allow_cold: bool = True
    include_degraded: bool = False


@dataclass(frozen=True)
class ScoredCandidate:
    """A candidate with its raw estimates and goodness components."""

    instance: ServiceInstance
    raw_latency: float
    raw_cost: float
    components: ScoreComponents


@dataclass(frozen=True)
class RoutingDecision:
    """Audit record of one selection."""

    prompt_id: str
    service_id: str
    score: float
    components: ScoreComponents
    classifier_output: ClassifierOutput
    cold_start: bool
    profile: WeightProfile
    strategy: SelectionStrategy = SelectionStrategy.MULTI_OBJECTIVE
    raw_latency: float = 0.0
    raw_cost: float = 0.0
    scoring_mode: ScoringMode = ScoringMode.NORMALIZED
    tier: str = ""
    snapshot_version: int = 0
    decided_at: float = field(default_factory=time.time)

    def to_dict(self) -> dict[str, object]:
        return {
            "prompt_id": self.prompt_id,
            "service_id": self.service_id,
            "score": self.score,
            "components": self.components.to_dict(),
            "classifier_output": self.classifier_output.to_dict(),
            "cold_start": self.cold_start,
            "profile": self.profile.to_dict(),
            "strategy": self.strategy.value,
            "scoring_mode": self.scoring_mode.value,
            "raw_latency": self.raw_latency,
            "raw_cost": self.raw_cost,
            "tier": self.tier,
            "snapshot_version": self.snapshot_version,
            "decided_at": self.decided_at,
        }


def raw_latency(instance: ServiceInstance, surcharge: bool = True) -> float:
    """Latency estimate, inflated by the cold-start duration for a zero-replica cell."""
    extra = instance.cold_start_duration if surcharge and instance.is_cold else 0.0
    return instance.latency_estimate + extra


def score_candidates(
    output: ClassifierOutput,
    candidates: Sequence[ServiceInstance],
    table: RelevanceTable,
    options: SelectionOptions,
) -> list[ScoredCandidate]:
    """
    Goodness components for every candidate.

    With matrix scope, latency and cost are normalized against the window
    stats of all candidates pooled together, each candidate's own raw
    estimate counting as one extra observation. With per-service scope each
    candidate is normalized against its own window only.
    """
    latencies = [raw_latency(c, options.cold_start_surcharge) for c in candidates]
    costs = [c.unit_cost for c in candidates]

    pooled_latency: NormalizationStats | None = None
    pooled_cost: NormalizationStats | None = None
    if options.scope == NormalizationScope.MATRIX:
        pooled_latency = pool_stats(c.latency_stats for c in candidates)
        pooled_cost = pool_stats(c.cost_stats for c in candidates)
        for lat in latencies:
            pooled_latency = pooled_latency.with_observation(lat)
        for cost in costs:
            pooled_cost = pooled_cost.with_observation(cost)

    scored = []
    for instance, lat, cost in zip(candidates, latencies, costs):
        lat_stats = pooled_latency or instance.latency_stats.with_observation(lat)
        cost_stats = pooled_cost or instance.cost_stats.with_observation(cost)
        components = ScoreComponents(
            relevance_hat=relevance(output, instance.tier, table),
            latency_hat=1.0 - normalize_metric(lat, lat_stats),
            cost_hat=1.0 - normalize_metric(cost, cost_stats),
        )
        scored.append(ScoredCandidate(instance, lat, cost, components))
    return scored


def select_service(
    prompt: Prompt,
    snapshot: RegistrySnapshot,
    profile: WeightProfile,
    output: ClassifierOutput,
    table: RelevanceTable,
    options: SelectionOptions | None = None,
    strategy: SelectionStrategy = SelectionStrategy.MULTI_OBJECTIVE,
    rng: np.random.Generator | None = None,
    now: float | None = None,
) -> RoutingDecision:
    """
    Route ``prompt`` to one cell of the matrix.

    Args:
        prompt: Prompt being routed
        snapshot: Registry snapshot to select from
        profile: Operator weight profile (used for scoring under every strategy)
        output: Complexity classification of the prompt
        table: Relevance table
        options: Normalization and eligibility options
        strategy: Selection strategy
        rng: Random generator for the random strategy
        now: Decision timestamp

    Returns:
        Routing decision

    Raises:
        NoHealthyServiceError: If no candidate is eligible
    """
    options = options or SelectionOptions()
    candidates = healthy_candidates(snapshot, options.allow_cold, options.include_degraded)
    if not candidates:
        raise NoHealthyServiceError(
            f"No healthy service for prompt {prompt.id} (snapshot v{snapshot.version})"
        )

    scored = score_candidates(output, candidates, table, options)
    latency_only = strategy == SelectionStrategy.LATENCY_ONLY
    scoring_profile = LATENCY_ONLY_PROFILE if latency_only else profile

    def value(item: ScoredCandidate) -> float:
        if options.mode == ScoringMode.LEGACY:
            return legacy_score(
                item.components.relevance_hat, item.raw_latency, item.raw_cost, scoring_profile
            )
        return score(item.components, scoring_profile)

    if strategy == SelectionStrategy.RANDOM:
        generator = rng if rng is not None else np.random.default_rng()
        chosen = scored[int(generator.integers(len(scored)))]
    else:
        by_id = {item.instance.service_id: item for item in scored}
        winner = pick_max(
            [
                (value(item), Candidate(item.instance.service_id, item.components, item.raw_cost))
                for item in scored
            ]
        )
        chosen = by_id[winner]

    decision = RoutingDecision(
        prompt_id=prompt.id,
        service_id=chosen.instance.service_id,
        score=value(chosen),
        components=chosen.components,
        classifier_output=output,
        cold_start=chosen.instance.is_cold,
        profile=scoring_profile,
        strategy=strategy,
        scoring_mode=options.mode,
        raw_latency=chosen.raw_latency,
        raw_cost=chosen.raw_cost,
        tier=chosen.instance.tier.value,
        snapshot_version=snapshot.version,
        decided_at=time.time() if now is None else now,
    )
    logger.debug(
        f"Prompt {prompt.id} -> {decision.service_id} score={decision.score:.4f} "
        f"({strategy.value}, cold={decision.cold_start})"
    )
    return decision


def recompute_score(decision: RoutingDecision) -> float:
    """Score implied by a decision's stored components and profile under its scoring mode."""
    if decision.scoring_mode == ScoringMode.LEGACY:
        return legacy_score(
            decision.components.relevance_hat,
            decision.raw_latency,
            decision.raw_cost,
            decision.profile,
        )
    return score(decision.components, decision.profile)


def decision_is_consistent(decision: RoutingDecision, tolerance: float = 1e-12) -> bool:
    return math.isclose(recompute_score(decision), decision.score, abs_tol=tolerance)
