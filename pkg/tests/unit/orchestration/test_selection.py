"""Unit tests for matrix selection."""

import math
from dataclasses import dataclass, field

import numpy as np
import pytest

from llm_orchestrator.errors import NoHealthyServiceError
from llm_orchestrator.orchestration import (
    LATENCY_ONLY_PROFILE,
    SelectionOptions,
    SelectionStrategy,
    decision_is_consistent,
    recompute_score,
    score_candidates,
    select_service,
)
from llm_orchestrator.registry import (
    BackendSpec,
    HealthState,
    ModelSpec,
    ServiceInstance,
    ServiceRegistry,
    healthy_candidates,
)
from llm_orchestrator.routing import (
    ClassifierOutput,
    ClassifierSource,
    ComplexityClass,
    ModelTier,
    Prompt,
    RelevanceTable,
)
from llm_orchestrator.scoring import (
    BALANCED,
    COST,
    QUALITY,
    NormalizationScope,
    ScoringMode,
    WeightProfile,
    legacy_score,
    score,
)
from tests.conftest import RegistryBuilder

TABLE = RelevanceTable()
PROMPT = Prompt(id="p-1", text="prove the theorem", arrival_time=0.0)
HIGH = ClassifierOutput.one_hot(ComplexityClass.HIGH, ClassifierSource.KEYWORD)
LOW = ClassifierOutput.one_hot(ComplexityClass.LOW, ClassifierSource.KEYWORD)


@pytest.fixture
def small_large(make_registry: RegistryBuilder) -> ServiceRegistry:
    """A cheap fast Small cell and an expensive slow Large cell, both warm."""
    return make_registry(
        {
            "s@vllm": {"tier": "small", "replicas": 1, "unit_cost": 0.002, "latency_prior": 0.5},
            "l@vllm": {"tier": "large", "replicas": 1, "unit_cost": 0.02, "latency_prior": 2.0},
        }
    )


@dataclass
class _Cell:
    """Plain record of a randomly generated cell, kept alongside the registry."""

    service_id: str
    tier: ModelTier
    healthy: bool
    replicas: int
    unit_cost: float
    latency_prior: float
    samples: list[tuple[float, bool]] = field(default_factory=list)


def _random_matrix(rng: np.random.Generator) -> tuple[ServiceRegistry, list[_Cell]]:
    registry = ServiceRegistry()
    cells = []
    tiers = list(ModelTier)
    for m in range(int(rng.integers(1, 7))):
        tier = tiers[int(rng.integers(3))]
        for b in range(int(rng.integers(1, 5))):
            instance = ServiceInstance(
                model_id=f"m{m}",
                backend_id=f"b{b}",
                health=HealthState.HEALTHY if rng.random() < 0.8 else HealthState.DOWN,
                replicas=int(rng.integers(0, 3)),
                unit_cost=float(rng.choice([0.001, 0.005, 0.01, 0.02])),
                latency_prior=float(rng.uniform(0.2, 5.0)),
            )
            registry.register(
                ModelSpec(model_id=f"m{m}", tier=tier), BackendSpec(backend_id=f"b{b}"), instance
            )
            cell = _Cell(
                instance.service_id,
                tier,
                instance.health == HealthState.HEALTHY,
                instance.replicas,
                instance.unit_cost,
                instance.latency_prior,
            )
            for k in range(int(rng.integers(0, 4))):
                latency = float(rng.uniform(0.2, 8.0))
                success = bool(rng.random() < 0.9)
                registry.record_sample(
                    instance.service_id, latency, 0.1, success, timestamp=float(k)
                )
                cell.samples.append((latency, success))
            cells.append(cell)
    return registry, cells


def _min_max_hat(value: float, observed: list[float]) -> float:
    """1 - min-max position of ``value`` in ``observed``; 0.5 when the range is degenerate."""
    if len(observed) < 2 or max(observed) - min(observed) < 1e-9:
        return 0.5
    return 1.0 - min(1.0, max(0.0, (value - min(observed)) / (max(observed) - min(observed))))


def _brute_force_pick(
    cells: list[_Cell],
    output: ClassifierOutput,
    profile: WeightProfile,
    scope: NormalizationScope,
) -> tuple[str, float]:
    """Exhaustive argmax over healthy cells, written out from the raw cell records."""
    eligible = [c for c in cells if c.healthy]
    latencies = {}
    for c in eligible:
        ok = [lat for lat, success in c.samples if success]
        estimate = sum(ok) / len(ok) if ok else c.latency_prior
        latencies[c.service_id] = estimate + (12.0 if c.replicas == 0 else 0.0)

    def observed(c: _Cell) -> tuple[list[float], list[float]]:
        group = eligible if scope == NormalizationScope.MATRIX else [c]
        lat = [s[0] for g in group for s in g.samples] + [latencies[g.service_id] for g in group]
        cost = [g.unit_cost for g in group for _ in g.samples] + [g.unit_cost for g in group]
        return lat, cost

    total = profile.alpha + profile.lam + profile.mu
    values = {}
    for c in eligible:
        lat_seen, cost_seen = observed(c)
        rel = math.fsum(
            p * TABLE.entries[k][c.tier] for p, k in zip(output.probabilities, ComplexityClass)
        )
        value = (
            profile.alpha / total * min(1.0, max(0.0, rel))
            + profile.lam / total * _min_max_hat(latencies[c.service_id], lat_seen)
            + profile.mu / total * _min_max_hat(c.unit_cost, cost_seen)
        )
        values[c.service_id] = min(1.0, max(0.0, value))

    best = max(values.values())
    tied = [c for c in eligible if values[c.service_id] >= best - 1e-12]
    winner = min(tied, key=lambda c: (c.unit_cost, c.service_id))
    return winner.service_id, best


class TestSelectService:
    """Tests for select_service."""

    def test_quality_prefers_large_for_high(self, small_large: ServiceRegistry) -> None:
        """Test the quality profile sends a High prompt to the Large tier."""
        decision = select_service(PROMPT, small_large.snapshot(), QUALITY, HIGH, TABLE)
        assert decision.service_id == "l@vllm"
        assert decision.tier == "large"

    def test_cost_prefers_small(self, small_large: ServiceRegistry) -> None:
        """Test the cost profile sends the same prompt to the cheap cell."""
        decision = select_service(PROMPT, small_large.snapshot(), COST, HIGH, TABLE)
        assert decision.service_id == "s@vllm"

    def test_latency_only(self, small_large: ServiceRegistry) -> None:
        """Test the latency-only strategy ignores relevance and cost."""
        decision = select_service(
            PROMPT,
            small_large.snapshot(),
            QUALITY,
            HIGH,
            TABLE,
            strategy=SelectionStrategy.LATENCY_ONLY,
        )
        assert decision.service_id == "s@vllm"
        assert decision.profile == LATENCY_ONLY_PROFILE

    def test_random_is_seeded(self, small_large: ServiceRegistry) -> None:
        """Test the random strategy is reproducible with a seeded generator."""

        def picks(seed: int) -> list[str]:
            rng = np.random.default_rng(seed)
            return [
                select_service(
                    PROMPT,
                    small_large.snapshot(),
                    BALANCED,
                    LOW,
                    TABLE,
                    strategy=SelectionStrategy.RANDOM,
                    rng=rng,
                ).service_id
                for _ in range(50)
            ]

        assert picks(3) == picks(3)
        assert set(picks(3)) == {"s@vllm", "l@vllm"}

    def test_no_healthy_service(self, make_registry: RegistryBuilder) -> None:
        """Test an all-Down matrix raises no-healthy-service."""
        registry = make_registry({"a@x": {"health": "down", "replicas": 1}})
        with pytest.raises(NoHealthyServiceError):
            select_service(PROMPT, registry.snapshot(), BALANCED, LOW, TABLE)

    def test_cold_surcharge(self, make_registry: RegistryBuilder) -> None:
        """Test a cold cell pays the cold-start duration in its latency estimate."""
        registry = make_registry(
            {
                "a@x": {"replicas": 0, "latency_prior": 0.5, "cold_start_duration": 12.0},
                "b@x": {"replicas": 1, "latency_prior": 2.0},
            }
        )
        decision = select_service(
            PROMPT,
            registry.snapshot(),
            BALANCED,
            LOW,
            TABLE,
            strategy=SelectionStrategy.LATENCY_ONLY,
        )
        assert decision.service_id == "b@x"
        no_surcharge = select_service(
            PROMPT,
            registry.snapshot(),
            BALANCED,
            LOW,
            TABLE,
            SelectionOptions(cold_start_surcharge=False),
            strategy=SelectionStrategy.LATENCY_ONLY,
        )
        assert no_surcharge.service_id == "a@x"
        assert no_surcharge.cold_start

    def test_cold_excluded_when_disallowed(self, make_registry: RegistryBuilder) -> None:
        """Test zero-replica cells are skipped when cold start is disabled."""
        registry = make_registry({"a@x": {"replicas": 0}})
        with pytest.raises(NoHealthyServiceError):
            select_service(
                PROMPT,
                registry.snapshot(),
                BALANCED,
                LOW,
                TABLE,
                SelectionOptions(allow_cold=False),
            )

    def test_tie_breaks_on_service_id(self, make_registry: RegistryBuilder) -> None:
        """Test identical cells resolve to the smaller service id."""
        registry = make_registry({"b@x": {"replicas": 1}, "a@x": {"replicas": 1}})
        decision = select_service(PROMPT, registry.snapshot(), BALANCED, LOW, TABLE)
        assert decision.service_id == "a@x"

    def test_legacy_mode(self, small_large: ServiceRegistry) -> None:
        """Test legacy scoring uses the raw linear form."""
        options = SelectionOptions(mode=ScoringMode.LEGACY)
        decision = select_service(
            PROMPT, small_large.snapshot(), QUALITY, HIGH, TABLE, options
        )
        assert decision.score == pytest.approx(
            legacy_score(
                decision.components.relevance_hat,
                decision.raw_latency,
                decision.raw_cost,
                QUALITY,
            )
        )

    def test_decision_audit(self, small_large: ServiceRegistry) -> None:
        """Test the stored components reproduce the decision score."""
        decision = select_service(PROMPT, small_large.snapshot(), BALANCED, HIGH, TABLE, now=7.0)
        assert decision_is_consistent(decision)
        assert recompute_score(decision) == decision.score
        assert decision.decided_at == 7.0
        assert decision.snapshot_version == small_large.snapshot().version
        assert decision.to_dict()["strategy"] == "multi_objective"

    def test_legacy_decision_audit(self, small_large: ServiceRegistry) -> None:
        """Test a legacy-mode decision is reproduced from its raw latency and cost."""
        options = SelectionOptions(mode=ScoringMode.LEGACY)
        decision = select_service(
            PROMPT, small_large.snapshot(), QUALITY, HIGH, TABLE, options, now=7.0
        )
        assert decision.scoring_mode == ScoringMode.LEGACY
        assert decision.to_dict()["scoring_mode"] == "legacy"
        assert decision_is_consistent(decision)
        assert recompute_score(decision) == decision.score
        assert score(decision.components, QUALITY) != pytest.approx(decision.score)

    @pytest.mark.parametrize("scope", list(NormalizationScope))
    def test_agrees_with_brute_force(self, scope: NormalizationScope) -> None:
        """Test selection equals exhaustive argmax on random matrices up to 6x4."""
        rng = np.random.default_rng(11)
        options = SelectionOptions(scope=scope)
        checked = 0
        while checked < 1000:
            registry, cells = _random_matrix(rng)
            snapshot = registry.snapshot()
            probs = rng.dirichlet(np.ones(3))
            output = ClassifierOutput.from_probabilities(probs, ClassifierSource.SEMANTIC)
            raw = rng.uniform(0.01, 1.0, size=3)
            profile = WeightProfile(alpha=float(raw[0]), lam=float(raw[1]), mu=float(raw[2]))
            if not any(c.healthy for c in cells):
                with pytest.raises(NoHealthyServiceError):
                    select_service(PROMPT, snapshot, profile, output, TABLE, options)
                continue

            expected, best = _brute_force_pick(cells, output, profile, scope)
            decision = select_service(PROMPT, snapshot, profile, output, TABLE, options)
            assert decision.service_id == expected
            assert decision.score == pytest.approx(best, abs=1e-12)
            checked += 1


class TestScoreCandidates:
    """Tests for score_candidates normalization."""

    def test_matrix_scope_spans_candidates(self, small_large: ServiceRegistry) -> None:
        """Test pooled normalization maps the fastest cell to 1 and the slowest to 0."""
        candidates = healthy_candidates(small_large.snapshot())
        scored = {
            s.instance.service_id: s
            for s in score_candidates(HIGH, candidates, TABLE, SelectionOptions())
        }
        assert scored["s@vllm"].components.latency_hat == 1.0
        assert scored["l@vllm"].components.latency_hat == 0.0
        assert scored["s@vllm"].components.cost_hat == 1.0
        assert scored["l@vllm"].components.relevance_hat == 1.0

    def test_per_service_scope_without_history(self, small_large: ServiceRegistry) -> None:
        """Test a cell with no samples normalizes to the neutral 0.5."""
        candidates = healthy_candidates(small_large.snapshot())
        options = SelectionOptions(scope=NormalizationScope.PER_SERVICE)
        for item in score_candidates(HIGH, candidates, TABLE, options):
            assert item.components.latency_hat == 0.5
            assert item.components.cost_hat == 0.5

    def test_default_scope_separates_fresh_cells(self, small_large: ServiceRegistry) -> None:
        """Test the default scope is matrix-wide and ranks cells that have no samples yet."""
        assert SelectionOptions().scope == NormalizationScope.MATRIX
        candidates = healthy_candidates(small_large.snapshot())
        hats = {
            s.instance.service_id: s.components.latency_hat
            for s in score_candidates(HIGH, candidates, TABLE, SelectionOptions())
        }
        assert hats["s@vllm"] > hats["l@vllm"]
