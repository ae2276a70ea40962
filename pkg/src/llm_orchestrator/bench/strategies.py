"""Strategies compared by the harness: one selection strategy and one scaling mode per run."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from llm_orchestrator.config.models import ScalingMode, ScenarioConfig
from llm_orchestrator.errors import UsageError
from llm_orchestrator.orchestration import ScalingPolicy, SelectionStrategy
from llm_orchestrator.routing import RoutingMode


class StrategyKind(str, Enum):
    """What a strategy varies relative to the scenario."""

    RANDOM = "random"
    LATENCY_ONLY = "latency_only"
    MULTI_OBJECTIVE = "multi_objective"
    KEYWORD_ROUTING = "keyword"
    SEMANTIC_ROUTING = "semantic"
    HYBRID = "hybrid"
    STATIC = "static"
    DYNAMIC = "dynamic"


_SELECTION = {
    StrategyKind.RANDOM: SelectionStrategy.RANDOM,
    StrategyKind.LATENCY_ONLY: SelectionStrategy.LATENCY_ONLY,
    StrategyKind.MULTI_OBJECTIVE: SelectionStrategy.MULTI_OBJECTIVE,
}
_ROUTING = {
    StrategyKind.KEYWORD_ROUTING: RoutingMode.KEYWORD,
    StrategyKind.SEMANTIC_ROUTING: RoutingMode.SEMANTIC,
    StrategyKind.HYBRID: RoutingMode.HYBRID,
}
_SCALING = {
    StrategyKind.STATIC: ScalingMode.STATIC,
    StrategyKind.DYNAMIC: ScalingMode.DYNAMIC,
}


@dataclass(frozen=True)
class StrategySpec:
    """
    A strategy to run over a trace.

    Selection kinds replace the scenario's selection strategy, routing kinds
    its classification mode, scaling kinds its scaling mode; everything else
    comes from the scenario, so each run still has exactly one of each.
    """

    kind: StrategyKind
    profile: str | None = None
    policy: ScalingPolicy | None = None
    name: str | None = None

    @property
    def label(self) -> str:
        if self.name:
            return self.name
        if self.kind == StrategyKind.MULTI_OBJECTIVE and self.profile:
            return f"{self.kind.value}:{self.profile}"
        return self.kind.value

    @classmethod
    def parse(cls, text: str) -> StrategySpec:
        """
        Parse ``kind`` or ``multi_objective:<profile>``.

        Raises:
            UsageError: If the kind is unknown
        """
        kind_text, _, profile = text.strip().partition(":")
        try:
            kind = StrategyKind(kind_text.strip().lower())
        except ValueError:
            known = ", ".join(k.value for k in StrategyKind)
            raise UsageError(f"Unknown strategy '{text}'. Known: {known}") from None
        return cls(kind=kind, profile=profile.strip() or None)

    def apply(self, scenario: ScenarioConfig, seed: int | None = None) -> ScenarioConfig:
        """Scenario with this strategy's overrides (and ``seed`` if given)."""
        selection = scenario.selection
        routing = scenario.routing
        scaling = scenario.scaling
        policy = scenario.policy

        if self.kind in _SELECTION:
            changes: dict[str, object] = {"strategy": _SELECTION[self.kind]}
            if self.profile:
                changes["profile"] = self.profile
            selection = selection.model_copy(update=changes)
        elif self.kind in _ROUTING:
            routing = routing.model_copy(update={"mode": _ROUTING[self.kind]})
        else:
            scaling = _SCALING[self.kind]
            if self.kind == StrategyKind.DYNAMIC and self.policy is not None:
                policy = self.policy

        return scenario.model_copy(
            update={
                "selection": selection,
                "routing": routing,
                "scaling": scaling,
                "policy": policy,
                "seed": scenario.seed if seed is None else seed,
            }
        )


SELECTION_STRATEGIES = (
    StrategySpec(StrategyKind.RANDOM),
    StrategySpec(StrategyKind.LATENCY_ONLY),
    StrategySpec(StrategyKind.MULTI_OBJECTIVE),
)
