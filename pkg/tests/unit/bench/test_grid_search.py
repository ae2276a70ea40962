"""Tests for the weight grid search."""

import pytest

from llm_orchestrator.bench.grid_search import (
    GridPoint,
    Objective,
    grid_search,
    select_objectives,
    weight_grid,
)
from llm_orchestrator.config.models import MatrixConfig, ScenarioConfig
from llm_orchestrator.errors import UsageError
from llm_orchestrator.scoring import WeightProfile
from llm_orchestrator.simulation import generate_trace


def _point(name: str, accuracy: float, cost: float, latency: float, composite: float) -> GridPoint:
    return GridPoint(
        profile=WeightProfile(name=name, alpha=1.0, lam=0.0, mu=0.0),
        accuracy=accuracy,
        cost_per_query=cost,
        avg_latency=latency,
        composite=composite,
    )


POINTS = [
    _point("accurate", 0.90, 0.020, 4.0, 0.70),
    _point("cheap", 0.60, 0.002, 1.0, 0.75),
    _point("middle", 0.87, 0.008, 2.0, 0.80),
]


class TestWeightGrid:
    """Tests for weight_grid."""

    def test_skips_all_zero(self) -> None:
        """Test the all-zero corner is dropped from the product."""
        grid = weight_grid([0.0, 1.0], [0.0, 1.0], [0.0, 1.0])
        assert len(grid) == 7
        assert len({p.name for p in grid}) == 7


class TestSelectObjectives:
    """Tests for select_objectives."""

    def test_constrained_objectives(self) -> None:
        """Test cost and latency are minimized among points above the accuracy floor."""
        result = select_objectives(POINTS)
        assert result.accuracy_floor == pytest.approx(0.855)
        assert result.best(Objective.MAX_ACCURACY) == POINTS[0]
        assert result.best(Objective.MIN_COST) == POINTS[2]
        assert result.best(Objective.MIN_LATENCY) == POINTS[2]
        assert result.best(Objective.MAX_COMPOSITE) == POINTS[2]

    def test_infeasible(self) -> None:
        """Test an unreachable floor is reported instead of a point."""
        result = select_objectives(POINTS, accuracy_floor=0.95)
        cost = next(r for r in result.results if r.objective == Objective.MIN_COST)
        assert not cost.feasible
        assert "0.9500" in (cost.message or "")
        assert result.best(Objective.MAX_ACCURACY) == POINTS[0]

    def test_empty(self) -> None:
        """Test an empty grid is a usage error."""
        with pytest.raises(UsageError):
            select_objectives([])


def test_grid_search_runs_every_point(
    sample_scenario: ScenarioConfig, two_tier_matrix: MatrixConfig
) -> None:
    """Test each profile is simulated once and cost-heavy weights stay cheap."""
    trace = generate_trace(sample_scenario.arrivals, sample_scenario.horizon, 3)
    grid = [
        WeightProfile(name="relevance", alpha=1.0, lam=0.0, mu=0.0),
        WeightProfile(name="cost", alpha=0.0, lam=0.0, mu=1.0),
    ]
    result = grid_search(trace, sample_scenario, two_tier_matrix, grid, accuracy_floor=0.0)
    assert [p.profile.name for p in result.points] == ["relevance", "cost"]
    by_name = {p.profile.name: p for p in result.points}
    assert by_name["cost"].cost_per_query <= by_name["relevance"].cost_per_query
    assert result.best(Objective.MIN_COST) == by_name["cost"]
