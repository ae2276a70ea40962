"""Tests for strategy specs and strategy comparison."""

import csv
from pathlib import Path

import pytest

from llm_orchestrator.bench.comparison import CSV_COLUMNS, run_comparison
from llm_orchestrator.bench.strategies import SELECTION_STRATEGIES, StrategyKind, StrategySpec
from llm_orchestrator.config.loader import ConfigLoader
from llm_orchestrator.config.models import MatrixConfig, ScalingMode, ScenarioConfig
from llm_orchestrator.errors import UsageError
from llm_orchestrator.orchestration import ScalingPolicy, SelectionStrategy
from llm_orchestrator.routing import RoutingMode
from llm_orchestrator.simulation import generate_trace


class TestStrategySpec:
    """Tests for StrategySpec."""

    def test_parse(self) -> None:
        """Test kinds and profile suffixes are parsed."""
        spec = StrategySpec.parse("multi_objective:cost")
        assert (spec.kind, spec.profile, spec.label) == (
            StrategyKind.MULTI_OBJECTIVE,
            "cost",
            "multi_objective:cost",
        )
        assert StrategySpec.parse(" Random ").kind == StrategyKind.RANDOM

    def test_parse_unknown(self) -> None:
        """Test an unknown kind lists the known ones."""
        with pytest.raises(UsageError, match="latency_only"):
            StrategySpec.parse("fastest")

    def test_apply_selection(self, sample_scenario: ScenarioConfig) -> None:
        """Test a selection kind only changes the selection strategy and seed."""
        applied = StrategySpec(StrategyKind.LATENCY_ONLY).apply(sample_scenario, seed=99)
        assert applied.selection.strategy == SelectionStrategy.LATENCY_ONLY
        assert applied.routing == sample_scenario.routing
        assert applied.scaling == sample_scenario.scaling
        assert applied.seed == 99

    def test_apply_routing_and_scaling(self, sample_scenario: ScenarioConfig) -> None:
        """Test routing and scaling kinds override their own field."""
        assert (
            StrategySpec(StrategyKind.HYBRID).apply(sample_scenario).routing.mode
            == RoutingMode.HYBRID
        )
        static = StrategySpec(StrategyKind.STATIC).apply(sample_scenario)
        assert static.scaling == ScalingMode.STATIC
        policy = ScalingPolicy(cooldown=5.0)
        dynamic = StrategySpec(StrategyKind.DYNAMIC, policy=policy).apply(sample_scenario)
        assert dynamic.policy.cooldown == 5.0


class TestRunComparison:
    """Tests for run_comparison."""

    def test_compares_selection_strategies(
        self,
        tmp_path: Path,
        sample_scenario: ScenarioConfig,
        two_tier_matrix: MatrixConfig,
    ) -> None:
        """Test each strategy gets a row, gains and a deterministic CSV."""
        trace = generate_trace(sample_scenario.arrivals, sample_scenario.horizon, 3)
        first = run_comparison(trace, sample_scenario, two_tier_matrix, SELECTION_STRATEGIES)
        second = run_comparison(trace, sample_scenario, two_tier_matrix, SELECTION_STRATEGIES)

        assert list(first.reports) == ["random", "latency_only", "multi_objective"]
        assert len(first.gains) == 6
        assert first.gain("multi_objective", "random").baseline == "random"

        paths = first.write(tmp_path / "a")
        second.write(tmp_path / "b")
        assert [p.name for p in paths] == ["comparison.csv", "comparison.json"]
        a = (tmp_path / "a" / "comparison.csv").read_bytes()
        assert a == (tmp_path / "b" / "comparison.csv").read_bytes()

        with open(paths[0], newline="", encoding="utf-8") as f:
            rows = list(csv.DictReader(f))
        assert [r["strategy"] for r in rows] == list(first.reports)
        assert list(rows[0]) == list(CSV_COLUMNS)

    def test_radar_covers_every_strategy(
        self, sample_scenario: ScenarioConfig, two_tier_matrix: MatrixConfig
    ) -> None:
        """Test radar data has five dimensions per strategy on the 0..10 scale."""
        trace = generate_trace(sample_scenario.arrivals, sample_scenario.horizon, 3)
        result = run_comparison(trace, sample_scenario, two_tier_matrix, SELECTION_STRATEGIES)
        radar = result.radar()
        assert set(radar) == set(result.reports)
        for scores in radar.values():
            assert len(scores) == 5
            assert all(0.0 <= v <= 10.0 for v in scores.values())

    def test_rejects_duplicate_labels(
        self, sample_scenario: ScenarioConfig, two_tier_matrix: MatrixConfig
    ) -> None:
        """Test two strategies with the same label are refused."""
        spec = StrategySpec(StrategyKind.RANDOM)
        with pytest.raises(UsageError):
            run_comparison([], sample_scenario, two_tier_matrix, [spec, spec])
        with pytest.raises(UsageError):
            run_comparison([], sample_scenario, two_tier_matrix, [])


@pytest.mark.slow
def test_calibration_ordering(config_loader: ConfigLoader) -> None:
    """Test multi-objective beats latency-only, which beats random, on the calibration run."""
    scenario = config_loader.load_scenario_config("calibration.yaml")
    matrix = config_loader.load_matrix_config(scenario.matrix)
    trace = generate_trace(scenario.arrivals, scenario.horizon, scenario.seed)
    result = run_comparison(trace, scenario, matrix, SELECTION_STRATEGIES)

    composite = {label: report.composite or 0.0 for label, report in result.reports.items()}
    assert composite["multi_objective"] > composite["latency_only"] > composite["random"]
    mo = result.reports["multi_objective"].metrics
    lat = result.reports["latency_only"].metrics
    rnd = result.reports["random"].metrics
    assert mo is not None and lat is not None and rnd is not None
    assert mo.cost_per_query < lat.cost_per_query
    assert mo.cost_per_query < rnd.cost_per_query
