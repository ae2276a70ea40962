"""Factory wiring registries, routers and orchestrators from configuration."""

from __future__ import annotations

import time
from collections import Counter
from collections.abc import Callable, Mapping, Sequence
from pathlib import Path

from llm_orchestrator.config.loader import ConfigLoader
from llm_orchestrator.config.models import (
    MatrixConfig,
    RoutingConfig,
    ScalingMode,
    SelectionConfig,
    SimServiceConfig,
)
from llm_orchestrator.orchestration import (
    DecisionLog,
    Orchestrator,
    ScalingPolicy,
    SelectionOptions,
)
from llm_orchestrator.registry import (
    BackendSpec,
    ModelSpec,
    ServiceInstance,
    ServiceRegistry,
)
from llm_orchestrator.registry.telemetry import DEFAULT_WINDOW_SECONDS
from llm_orchestrator.routing import (
    BaseClassifier,
    ComplexityRouter,
    ExternalClassifier,
    KeywordRuleSet,
    ReferenceClassifier,
    RelevanceTable,
)
from llm_orchestrator.scoring import DEFAULT_PROFILES, WeightProfile
from llm_orchestrator.utils.logging import get_logger

logger = get_logger(__name__)


class EngineFactory:
    """Builds the routing engine from matrix, routing and selection configuration."""

    def __init__(self, config_loader: ConfigLoader | None = None) -> None:
        """
        Initialize engine factory.

        Args:
            config_loader: Loader used for rule files, profiles and artifacts
        """
        self._config_loader = config_loader

    @property
    def config_loader(self) -> ConfigLoader:
        """Loader for the config directory, created on first use."""
        if self._config_loader is None:
            self._config_loader = ConfigLoader()
        return self._config_loader

    def create_registry(
        self,
        matrix: MatrixConfig,
        services: Sequence[SimServiceConfig],
        replicas: Mapping[str, int] | None = None,
        window_duration: float = DEFAULT_WINDOW_SECONDS,
        admission_control: bool = True,
    ) -> ServiceRegistry:
        """
        Register every resolved matrix cell.

        Args:
            matrix: Matrix the cells were resolved from
            services: Resolved cells
            replicas: Initial replica count per service id (default 0)
            window_duration: Telemetry window in seconds
            admission_control: Reject inflight counts above capacity

        Returns:
            Populated registry
        """
        replicas = replicas or {}
        registry = ServiceRegistry(window_duration, admission_control=admission_control)
        for service in services:
            model = matrix.model_by_id(service.model_id)
            backend = matrix.backend_by_id(service.backend_id)
            registry.register(
                ModelSpec(
                    model_id=model.id,
                    tier=model.tier,
                    parameter_count=model.parameter_count,
                    warm_pool_floor=model.warm_pool_floor,
                ),
                BackendSpec(
                    backend_id=backend.id,
                    throughput_class=backend.throughput_class,
                    latency_class=backend.latency_class,
                    memory_class=backend.memory_class,
                ),
                ServiceInstance(
                    model_id=service.model_id,
                    backend_id=service.backend_id,
                    tier=service.tier,
                    replicas=replicas.get(service.service_id, 0),
                    concurrency_per_replica=service.concurrency_per_replica,
                    unit_cost=service.unit_cost,
                    latency_prior=service.latency_prior,
                    cold_start_duration=service.cold_start_duration,
                    endpoint=service.endpoint,
                ),
            )
        return registry

    def create_router(
        self, routing: RoutingConfig, model: BaseClassifier | None = None
    ) -> ComplexityRouter:
        """
        Build the complexity router.

        The semantic model is ``model`` if given, else the configured artifact,
        else the configured classifier service, else none.

        Raises:
            FileNotFoundError: If the keyword file or classifier artifact is missing
        """
        if routing.keywords_file:
            rules = self.config_loader.load_keyword_rules(routing.keywords_file)
        else:
            rules = KeywordRuleSet(
                low_keywords=frozenset(routing.low_keywords),
                high_keywords=frozenset(routing.high_keywords),
            )
        entries = routing.relevance.entries()
        table = RelevanceTable(entries=entries) if entries else RelevanceTable()

        if model is None and routing.classifier_artifact:
            path = self._resolve(routing.classifier_artifact)
            model = ReferenceClassifier.load(path)
            logger.info(f"Loaded reference classifier from {path}")
        elif model is None and routing.classifier_url:
            model = ExternalClassifier(routing.classifier_url, timeout=routing.classifier_timeout)

        return ComplexityRouter(
            rules=rules,
            model=model,
            relevance_table=table,
            mode=routing.mode,
            confidence_threshold=routing.confidence_threshold,
        )

    @staticmethod
    def create_selection_options(
        selection: SelectionConfig, policy: ScalingPolicy
    ) -> SelectionOptions:
        return SelectionOptions(
            scope=selection.scope,
            mode=selection.scoring_mode,
            cold_start_surcharge=selection.cold_start_surcharge,
            allow_cold=policy.allow_cold_start,
            include_degraded=selection.include_degraded,
        )

    def create_orchestrator(
        self,
        registry: ServiceRegistry,
        router: ComplexityRouter,
        policy: ScalingPolicy,
        selection: SelectionConfig,
        profiles: Mapping[str, WeightProfile] | None = None,
        decision_log: DecisionLog | None = None,
        seed: int | None = None,
        clock: Callable[[], float] = time.time,
    ) -> Orchestrator:
        return Orchestrator(
            registry,
            router=router,
            policy=policy,
            profiles=profiles,
            default_profile=selection.profile,
            options=self.create_selection_options(selection, policy),
            decision_log=decision_log,
            seed=seed,
            clock=clock,
        )

    def load_profiles(
        self, filename: str = "profiles.yaml", required: bool = True
    ) -> dict[str, WeightProfile]:
        """
        Named profiles from the profiles file.

        Args:
            filename: File under the config directory
            required: Raise when the file is missing instead of using the built-in profiles

        Raises:
            FileNotFoundError: If the file is missing and ``required`` is set
        """
        try:
            return self.config_loader.load_profiles(filename).as_mapping()
        except FileNotFoundError:
            if required:
                raise
            logger.warning(f"Profiles file {filename} not found, using built-in profiles")
            return dict(DEFAULT_PROFILES)

    def _resolve(self, path: str) -> Path:
        candidate = Path(path)
        if candidate.is_absolute() or candidate.exists():
            return candidate
        return self.config_loader.config_path / candidate


def initial_replicas(
    matrix: MatrixConfig,
    services: Sequence[SimServiceConfig],
    policy: ScalingPolicy,
    scaling: ScalingMode,
    static_replicas: int = 0,
    prewarm: bool = True,
) -> dict[str, int]:
    """
    Replica count per cell at start-up.

    Static deployments get ``static_replicas`` everywhere. With ``prewarm``,
    dynamic ones start every cell at its model's warm floor, never putting
    more than ``max_replicas_per_model`` on one model's row; idle rows are
    trimmed back to the floor by the scaling loop. Without it they start at zero.
    """
    counts: dict[str, int] = {}
    row_totals: Counter[str] = Counter()
    for service in services:
        if scaling == ScalingMode.STATIC:
            counts[service.service_id] = static_replicas
        elif prewarm:
            model = matrix.model_by_id(service.model_id)
            floor = policy.warm_floor(service.tier, model.warm_pool_floor)
            room = policy.max_replicas_per_model - row_totals[service.model_id]
            counts[service.service_id] = min(floor, room)
            row_totals[service.model_id] += counts[service.service_id]
        else:
            counts[service.service_id] = 0
    return counts
