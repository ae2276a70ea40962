"""Run several strategies over one trace and compare them."""

from __future__ import annotations

import csv
import json
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from rich.console import Console
from rich.table import Table

from llm_orchestrator.bench.metrics import compute_efficiency, radar_scores
from llm_orchestrator.bench.strategies import StrategySpec
from llm_orchestrator.bench.traces import TraceRecord
from llm_orchestrator.config.models import MatrixConfig, ScenarioConfig
from llm_orchestrator.errors import UndefinedEfficiencyError, UsageError
from llm_orchestrator.routing import ComplexityRouter
from llm_orchestrator.scoring import WeightProfile
from llm_orchestrator.simulation import SimReport, Simulation
from llm_orchestrator.utils.logging import get_logger

logger = get_logger(__name__)

ACCURACY_NOTE = (
    "accuracy = routing-success credit (success x relevance of the chosen tier "
    "for the prompt's labeled complexity), not graded task accuracy"
)

CSV_COLUMNS = (
    "strategy",
    "total",
    "successes",
    "failures",
    "in_flight",
    "success_rate",
    "accuracy",
    "avg_latency",
    "ttft_p50",
    "ttft_p95",
    "ttft_p99",
    "throughput",
    "total_cost",
    "cost_per_query",
    "replica_cost",
    "gpu_utilization",
    "composite",
)


@dataclass(frozen=True)
class PairwiseGain:
    """Gains of ``strategy`` relative to ``baseline``, in percent (efficiency as a ratio)."""

    strategy: str
    baseline: str
    accuracy_gain: float | None
    latency_change: float | None
    cost_change: float | None
    efficiency: float | None

    def to_dict(self) -> dict[str, Any]:
        return {
            "strategy": self.strategy,
            "baseline": self.baseline,
            "accuracy_gain": self.accuracy_gain,
            "latency_change": self.latency_change,
            "cost_change": self.cost_change,
            "efficiency": self.efficiency,
        }


@dataclass
class ComparisonResult:
    """Per-strategy simulation reports plus derived comparisons."""

    scenario: str
    seed: int
    reports: dict[str, SimReport]
    gains: list[PairwiseGain] = field(default_factory=list)

    def row(self, label: str) -> dict[str, Any]:
        report = self.reports[label]
        metrics = report.metrics.to_dict() if report.metrics else {}
        row: dict[str, Any] = {"strategy": label}
        for column in CSV_COLUMNS[1:]:
            if column in metrics:
                row[column] = metrics[column]
        row["replica_cost"] = report.replica_cost
        row["gpu_utilization"] = report.gpu_utilization
        row["composite"] = report.composite
        return row

    def rows(self) -> list[dict[str, Any]]:
        return [self.row(label) for label in self.reports]

    def radar(self) -> dict[str, dict[str, float]]:
        reports = {k: r.metrics for k, r in self.reports.items() if r.metrics is not None}
        utilization = {k: r.gpu_utilization for k, r in self.reports.items()}
        return radar_scores(reports, utilization) if len(reports) >= 2 else {}

    def gain(self, strategy: str, baseline: str) -> PairwiseGain:
        for item in self.gains:
            if item.strategy == strategy and item.baseline == baseline:
                return item
        raise KeyError((strategy, baseline))

    def to_dict(self) -> dict[str, Any]:
        return {
            "scenario": self.scenario,
            "seed": self.seed,
            "note": ACCURACY_NOTE,
            "strategies": self.rows(),
            "gains": [g.to_dict() for g in self.gains],
            "radar": self.radar(),
        }

    def write_csv(self, path: Path) -> None:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="", encoding="utf-8") as f:
            writer = csv.DictWriter(f, fieldnames=list(CSV_COLUMNS))
            writer.writeheader()
            for row in self.rows():
                writer.writerow({k: _csv_value(row.get(k)) for k in CSV_COLUMNS})

    def write_json(self, path: Path) -> None:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True), encoding="utf-8")

    def write(self, out_dir: Path, write_outcomes: bool = False) -> list[Path]:
        """Write ``comparison.csv``, ``comparison.json`` and optionally per-strategy outcomes."""
        csv_path = out_dir / "comparison.csv"
        json_path = out_dir / "comparison.json"
        self.write_csv(csv_path)
        self.write_json(json_path)
        written = [csv_path, json_path]
        if write_outcomes:
            for label, report in self.reports.items():
                written.extend(report.write(out_dir, name=_file_safe(label)))
        return written

    def render(self, console: Console | None = None) -> None:
        console = console or Console()
        table = Table(title=f"Strategy comparison: {self.scenario} (seed {self.seed})")
        table.add_column("Strategy", style="cyan")
        table.add_column("Success", style="green")
        table.add_column("Accuracy", style="green")
        table.add_column("Avg latency (s)", style="white")
        table.add_column("TTFT p95 (s)", style="white")
        table.add_column("Cost/query", style="yellow")
        table.add_column("Composite", style="magenta")
        for row in self.rows():
            table.add_row(
                row["strategy"],
                _fmt(row.get("success_rate"), "{:.1%}"),
                _fmt(row.get("accuracy"), "{:.3f}"),
                _fmt(row.get("avg_latency"), "{:.2f}"),
                _fmt(row.get("ttft_p95"), "{:.2f}"),
                _fmt(row.get("cost_per_query"), "{:.5f}"),
                _fmt(row.get("composite"), "{:.4f}"),
            )
        console.print(table)
        if self.gains:
            gains = Table(title="Pairwise gains (%)")
            gains.add_column("Strategy", style="cyan")
            gains.add_column("vs", style="cyan")
            gains.add_column("Accuracy", style="green")
            gains.add_column("Latency", style="white")
            gains.add_column("Cost", style="yellow")
            gains.add_column("Efficiency", style="magenta")
            for g in self.gains:
                gains.add_row(
                    g.strategy,
                    g.baseline,
                    _fmt(g.accuracy_gain, "{:+.1f}"),
                    _fmt(g.latency_change, "{:+.1f}"),
                    _fmt(g.cost_change, "{:+.1f}"),
                    _fmt(g.efficiency, "{:.3f}"),
                )
            console.print(gains)
        console.print(f"[dim]{ACCURACY_NOTE}[/dim]")


def _fmt(value: float | None, pattern: str) -> str:
    return "n/a" if value is None else pattern.format(value)


def _csv_value(value: Any) -> Any:
    return "" if value is None else repr(value) if isinstance(value, float) else value


def _file_safe(label: str) -> str:
    return label.replace(":", "-").replace("/", "-")


def _change(value: float, baseline: float) -> float | None:
    return None if baseline == 0 else (value - baseline) / baseline * 100.0


def pairwise_gains(reports: Mapping[str, SimReport]) -> list[PairwiseGain]:
    """Gains of every strategy against every other, in input order."""
    gains = []
    for name, report in reports.items():
        for base_name, base in reports.items():
            if name == base_name or report.metrics is None or base.metrics is None:
                continue
            m, b = report.metrics, base.metrics
            try:
                efficiency: float | None = compute_efficiency(
                    m.accuracy, b.accuracy, m.cost_per_query, b.cost_per_query
                )
            except UndefinedEfficiencyError:
                efficiency = None
            gains.append(
                PairwiseGain(
                    strategy=name,
                    baseline=base_name,
                    accuracy_gain=_change(m.accuracy, b.accuracy),
                    latency_change=_change(m.avg_latency, b.avg_latency),
                    cost_change=_change(m.cost_per_query, b.cost_per_query),
                    efficiency=efficiency,
                )
            )
    return gains


def run_comparison(
    trace: Sequence[TraceRecord],
    scenario: ScenarioConfig,
    matrix: MatrixConfig,
    strategies: Sequence[StrategySpec],
    seed: int | None = None,
    router: ComplexityRouter | None = None,
    profiles: Mapping[str, WeightProfile] | None = None,
) -> ComparisonResult:
    """
    Run every strategy over the same trace and seed.

    Args:
        trace: Prompts with arrival offsets
        scenario: Base scenario each strategy modifies
        matrix: Service matrix
        strategies: Strategies to run (labels must be unique)
        seed: Seed for every run (defaults to the scenario seed)
        router: Router shared by all runs (built from the scenario if None)
        profiles: Named weight profiles (defaults to the built-in ones)

    Returns:
        Comparison result

    Raises:
        UsageError: If no strategies are given or labels repeat
    """
    if not strategies:
        raise UsageError("run_comparison needs at least one strategy")
    labels = [s.label for s in strategies]
    if len(set(labels)) != len(labels):
        raise UsageError(f"Strategy labels must be unique, got {labels}")

    run_seed = scenario.seed if seed is None else seed
    reports: dict[str, SimReport] = {}
    for spec in strategies:
        logger.info(f"Running strategy {spec.label}")
        configured = spec.apply(scenario, run_seed)
        reports[spec.label] = Simulation(
            configured, matrix, trace, router=router, profiles=profiles
        ).run()

    return ComparisonResult(
        scenario=scenario.name,
        seed=run_seed,
        reports=reports,
        gains=pairwise_gains(reports),
    )
