"""Weight grid search over operator objectives."""

from __future__ import annotations

import itertools
import json
from collections.abc import Callable, Iterable, Mapping, Sequence
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Any

from rich.console import Console
from rich.table import Table

from llm_orchestrator.bench.traces import TraceRecord
from llm_orchestrator.config.models import MatrixConfig, ScenarioConfig
from llm_orchestrator.errors import InvalidProfileError, UsageError
from llm_orchestrator.orchestration import SelectionStrategy
from llm_orchestrator.routing import ComplexityRouter
from llm_orchestrator.scoring import WeightProfile
from llm_orchestrator.simulation import SimReport, Simulation
from llm_orchestrator.utils.logging import get_logger

logger = get_logger(__name__)

DEFAULT_ACCURACY_FLOOR_RATIO = 0.95


class Objective(str, Enum):
    """Operator objectives a grid point can be chosen for."""

    MAX_ACCURACY = "max_accuracy"
    MIN_COST = "min_cost"
    MIN_LATENCY = "min_latency"
    MAX_COMPOSITE = "max_composite"


@dataclass(frozen=True)
class GridPoint:
    """Metrics of one profile on the validation trace."""

    profile: WeightProfile
    accuracy: float
    cost_per_query: float
    avg_latency: float
    composite: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "profile": self.profile.to_dict(),
            "accuracy": self.accuracy,
            "cost_per_query": self.cost_per_query,
            "avg_latency": self.avg_latency,
            "composite": self.composite,
        }


@dataclass(frozen=True)
class ObjectiveResult:
    objective: Objective
    best: GridPoint | None
    message: str | None = None

    @property
    def feasible(self) -> bool:
        return self.best is not None

    def to_dict(self) -> dict[str, Any]:
        return {
            "objective": self.objective.value,
            "feasible": self.feasible,
            "best": self.best.to_dict() if self.best else None,
            "message": self.message,
        }


@dataclass(frozen=True)
class GridSearchResult:
    points: tuple[GridPoint, ...]
    results: tuple[ObjectiveResult, ...]
    accuracy_floor: float

    def best(self, objective: Objective) -> GridPoint | None:
        for result in self.results:
            if result.objective == objective:
                return result.best
        raise KeyError(objective)

    def to_dict(self) -> dict[str, Any]:
        return {
            "accuracy_floor": self.accuracy_floor,
            "objectives": [r.to_dict() for r in self.results],
            "points": [p.to_dict() for p in self.points],
        }

    def write_json(self, path: Path) -> None:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True), encoding="utf-8")

    def render(self, console: Console | None = None) -> None:
        console = console or Console()
        table = Table(title=f"Grid search ({len(self.points)} points)")
        table.add_column("Objective", style="cyan")
        table.add_column("alpha", style="green")
        table.add_column("lambda", style="green")
        table.add_column("mu", style="green")
        table.add_column("Accuracy", style="white")
        table.add_column("Cost/query", style="yellow")
        table.add_column("Latency (s)", style="white")
        table.add_column("Composite", style="magenta")
        for result in self.results:
            if result.best is None:
                table.add_row(result.objective.value, "-", "-", "-", result.message or "infeasible")
                continue
            p = result.best
            table.add_row(
                result.objective.value,
                f"{p.profile.alpha:g}",
                f"{p.profile.lam:g}",
                f"{p.profile.mu:g}",
                f"{p.accuracy:.4f}",
                f"{p.cost_per_query:.5f}",
                f"{p.avg_latency:.2f}",
                f"{p.composite:.4f}",
            )
        console.print(table)


def weight_grid(
    alphas: Iterable[float], lams: Iterable[float], mus: Iterable[float]
) -> list[WeightProfile]:
    """Cartesian grid of profiles; all-zero points are skipped."""
    profiles = []
    for alpha, lam, mu in itertools.product(list(alphas), list(lams), list(mus)):
        try:
            profiles.append(
                WeightProfile(name=f"a{alpha:g}-l{lam:g}-m{mu:g}", alpha=alpha, lam=lam, mu=mu)
            )
        except (InvalidProfileError, ValueError) as e:
            logger.warning(f"Skipping grid point ({alpha}, {lam}, {mu}): {e}")
    return profiles


def _argbest(
    points: Sequence[GridPoint], key: Callable[[GridPoint], float], maximize: bool
) -> GridPoint:
    best = points[0]
    for point in points[1:]:
        better = key(point) > key(best) if maximize else key(point) < key(best)
        if better:
            best = point
    return best


def select_objectives(
    points: Sequence[GridPoint],
    accuracy_floor_ratio: float = DEFAULT_ACCURACY_FLOOR_RATIO,
    accuracy_floor: float | None = None,
) -> GridSearchResult:
    """
    Pick the best grid point per objective.

    Cost and latency objectives only consider points whose accuracy reaches
    the floor: ``accuracy_floor`` when given, else ``accuracy_floor_ratio``
    times the best accuracy on the grid. Ties keep the earliest point.

    Raises:
        UsageError: If ``points`` is empty
    """
    if not points:
        raise UsageError("Grid search needs at least one grid point")
    best_accuracy = max(p.accuracy for p in points)
    floor = accuracy_floor if accuracy_floor is not None else accuracy_floor_ratio * best_accuracy
    feasible = [p for p in points if p.accuracy >= floor]

    results = [
        ObjectiveResult(Objective.MAX_ACCURACY, _argbest(points, lambda p: p.accuracy, True)),
    ]
    for objective, key in (
        (Objective.MIN_COST, lambda p: p.cost_per_query),
        (Objective.MIN_LATENCY, lambda p: p.avg_latency),
    ):
        if feasible:
            results.append(ObjectiveResult(objective, _argbest(feasible, key, False)))
        else:
            message = f"no grid point reaches accuracy floor {floor:.4f}"
            logger.warning(f"Objective {objective.value} infeasible: {message}")
            results.append(ObjectiveResult(objective, None, message))
    results.append(
        ObjectiveResult(Objective.MAX_COMPOSITE, _argbest(points, lambda p: p.composite, True))
    )
    return GridSearchResult(tuple(points), tuple(results), floor)


def evaluate_profile(
    profile: WeightProfile,
    trace: Sequence[TraceRecord],
    scenario: ScenarioConfig,
    matrix: MatrixConfig,
    router: ComplexityRouter | None = None,
) -> GridPoint:
    """Run the multi-objective strategy with ``profile`` over the trace."""
    configured = scenario.model_copy(
        update={
            "selection": scenario.selection.model_copy(
                update={"strategy": SelectionStrategy.MULTI_OBJECTIVE, "profile": profile.name}
            )
        }
    )
    report: SimReport = Simulation(
        configured, matrix, trace, router=router, profiles={profile.name: profile}
    ).run()
    if report.metrics is None:
        raise UsageError("Grid search needs a non-empty validation trace")
    return GridPoint(
        profile=profile,
        accuracy=report.metrics.accuracy,
        cost_per_query=report.metrics.cost_per_query,
        avg_latency=report.metrics.avg_latency,
        composite=report.composite or 0.0,
    )


def grid_search(
    trace: Sequence[TraceRecord],
    scenario: ScenarioConfig,
    matrix: MatrixConfig,
    grid: Sequence[WeightProfile] | Mapping[str, WeightProfile],
    router: ComplexityRouter | None = None,
    accuracy_floor_ratio: float = DEFAULT_ACCURACY_FLOOR_RATIO,
    accuracy_floor: float | None = None,
) -> GridSearchResult:
    """
    Evaluate every grid profile on the validation trace and pick one per objective.

    Args:
        trace: Validation trace
        scenario: Scenario the runs are based on
        matrix: Service matrix
        grid: Profiles to evaluate
        router: Router shared by all runs
        accuracy_floor_ratio: Floor for constrained objectives relative to the best accuracy
        accuracy_floor: Absolute floor overriding the ratio

    Returns:
        Grid search result; infeasible objectives carry a message instead of a point

    Raises:
        UsageError: If the grid is empty
    """
    profiles = list(grid.values()) if isinstance(grid, Mapping) else list(grid)
    if not profiles:
        raise UsageError("Grid search needs at least one grid point")
    logger.info(f"Grid search over {len(profiles)} profiles, {len(trace)} prompts")
    points = [evaluate_profile(p, trace, scenario, matrix, router) for p in profiles]
    return select_objectives(points, accuracy_floor_ratio, accuracy_floor)
