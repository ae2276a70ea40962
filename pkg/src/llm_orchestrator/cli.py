"""CLI for the LLM orchestrator: simulation, benchmarking, training and the gateway."""

import sys
from pathlib import Path

import click
import httpx
import uvicorn
from dotenv import load_dotenv
from rich.console import Console
from rich.table import Table

from llm_orchestrator.bench.comparison import run_comparison
from llm_orchestrator.bench.grid_search import (
    DEFAULT_ACCURACY_FLOOR_RATIO,
    grid_search,
    weight_grid,
)
from llm_orchestrator.bench.replay import DEFAULT_CONCURRENCY, replay_gateway
from llm_orchestrator.bench.strategies import SELECTION_STRATEGIES, StrategySpec
from llm_orchestrator.bench.traces import TraceRecord, read_trace, write_trace
from llm_orchestrator.bench.training import (
    planted_corpus,
    read_corpus,
    train_reference_classifier,
)
from llm_orchestrator.config import ConfigLoader, ConfigValidator
from llm_orchestrator.config.models import ArrivalConfig, ArrivalKind, ScenarioConfig
from llm_orchestrator.factory import EngineFactory
from llm_orchestrator.gateway import create_app
from llm_orchestrator.routing import RelevanceTable, RoutingMode
from llm_orchestrator.simulation import SimReport, Simulation, generate_trace
from llm_orchestrator.utils.logging import setup_logging

console = Console()

DEFAULT_GRID_VALUES = "0.1,0.3,0.5,0.7,1.0"
DEFAULT_ARTIFACT_NAME = "classifier.pslc"


def _loader(ctx: click.Context) -> ConfigLoader:
    if "loader" not in ctx.obj:
        ctx.obj["loader"] = ConfigLoader(ctx.obj["config_dir"])
    loader: ConfigLoader = ctx.obj["loader"]
    return loader


def _floats(text: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise click.BadParameter(f"expected comma-separated numbers, got '{text}'") from None


def _scenario_and_trace(
    loader: ConfigLoader, config: str, trace: Path | None, seed: int | None
) -> tuple[ScenarioConfig, list[TraceRecord]]:
    scenario = loader.load_scenario_config(config)
    if seed is not None:
        scenario = scenario.model_copy(update={"seed": seed})
    if trace is not None:
        records = read_trace(trace)
    else:
        records = generate_trace(
            scenario.arrivals, scenario.horizon, scenario.seed, base_path=loader.config_path
        )
    return scenario, records


def _render_report(report: SimReport) -> None:
    table = Table(
        title=f"Simulation: {report.scenario} ({report.strategy}, {report.scaling}, "
        f"seed {report.seed})"
    )
    table.add_column("Metric", style="cyan")
    table.add_column("Value", style="green")
    table.add_row("Requests", str(report.total_requests))
    if report.metrics is not None:
        m = report.metrics
        table.add_row(
            "Successes / failures / in flight", f"{m.successes} / {m.failures} / {m.in_flight}"
        )
        table.add_row("Success rate", f"{m.success_rate:.1%}")
        table.add_row("Accuracy credit", f"{m.accuracy:.4f}")
        table.add_row("Avg latency (s)", f"{m.avg_latency:.3f}")
        table.add_row(
            "TTFT p50 / p95 / p99 (s)",
            f"{m.ttft_p50:.3f} / {m.ttft_p95:.3f} / {m.ttft_p99:.3f}",
        )
        table.add_row("Throughput (req/s)", f"{m.throughput:.3f}")
        table.add_row("Cost/query", f"{m.cost_per_query:.5f}")
    table.add_row("Replica cost", f"{report.replica_cost:.4f}")
    table.add_row("GPU utilization", f"{report.gpu_utilization:.1%}")
    table.add_row("Composite", "n/a" if report.composite is None else f"{report.composite:.4f}")
    console.print(table)

    services = Table(title="Services")
    services.add_column("Service", style="cyan")
    services.add_column("Routed", style="white")
    services.add_column("Success", style="green")
    services.add_column("Cold starts", style="yellow")
    services.add_column("Scale-ups", style="yellow")
    services.add_column("Replica cost", style="magenta")
    for s in report.services:
        if s.routed == 0 and s.replica_seconds == 0:
            continue
        services.add_row(
            s.service_id,
            str(s.routed),
            str(s.successes),
            str(s.cold_starts),
            str(s.scale_ups),
            f"{s.replica_cost:.4f}",
        )
    console.print(services)


@click.group()
@click.option(
    "--config-dir",
    type=click.Path(file_okay=False, path_type=Path),
    default=None,
    help="Configuration directory (defaults to PS_CONFIG_DIR or ./config)",
)
@click.option(
    "--log-level",
    type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"]),
    default="INFO",
    help="Logging level",
)
@click.option("--rich-logs/--plain-logs", default=False, help="Render log records with rich")
@click.option(
    "--log-file",
    type=click.Path(dir_okay=False, path_type=Path),
    default=None,
    help="Also append log records to this file",
)
@click.pass_context
def cli(
    ctx: click.Context,
    config_dir: Path | None,
    log_level: str,
    rich_logs: bool,
    log_file: Path | None,
) -> None:
    """Multi-model LLM routing and orchestration CLI."""
    load_dotenv()
    setup_logging(level=log_level, rich_console=rich_logs, log_file=log_file)
    ctx.ensure_object(dict)
    ctx.obj["config_dir"] = config_dir
    ctx.obj["log_level"] = log_level


@cli.command()
@click.option("--config", required=True, help="Scenario file under config/scenarios")
@click.option("--trace", type=click.Path(exists=True, path_type=Path), help="JSONL trace to replay")
@click.option("--seed", type=int, default=None, help="Override the scenario seed")
@click.option("--out", type=click.Path(path_type=Path), default=None, help="Output directory")
@click.option("--strategy", default=None, help="Strategy override, e.g. multi_objective:cost")
@click.option("--record-events/--no-record-events", default=False, help="Keep the event trace")
@click.pass_context
def simulate(
    ctx: click.Context,
    config: str,
    trace: Path | None,
    seed: int | None,
    out: Path | None,
    strategy: str | None,
    record_events: bool,
) -> None:
    """Run one scenario through the discrete-event simulator."""
    console.print(f"\n[bold blue]Simulating: {config}[/bold blue]\n")
    try:
        loader = _loader(ctx)
        scenario, records = _scenario_and_trace(loader, config, trace, seed)
        if strategy:
            scenario = StrategySpec.parse(strategy).apply(scenario)
        if record_events:
            scenario = scenario.model_copy(update={"record_events": True})
        matrix = loader.load_matrix_config(scenario.matrix)
        factory = EngineFactory(loader)
        report = Simulation(
            scenario,
            matrix,
            records,
            router=factory.create_router(scenario.routing),
            profiles=factory.load_profiles(required=False),
            factory=factory,
        ).run()
        _render_report(report)
        if out is not None:
            for path in report.write(out):
                console.print(f"Wrote [green]{path}[/green]")
    except Exception as e:
        console.print(f"[bold red]Error: {e}[/bold red]")
        sys.exit(1)


@cli.command()
@click.option("--config", required=True, help="Scenario file under config/scenarios")
@click.option("--trace", type=click.Path(exists=True, path_type=Path), help="JSONL trace to replay")
@click.option("--seed", type=int, default=None, help="Seed for every strategy run")
@click.option("--out", type=click.Path(path_type=Path), default=None, help="Output directory")
@click.option(
    "--strategy",
    "strategies",
    multiple=True,
    help="Strategy to run (repeatable); defaults to random, latency_only, multi_objective",
)
@click.option("--write-outcomes/--no-write-outcomes", default=False, help="Per-request JSONL")
@click.pass_context
def compare(
    ctx: click.Context,
    config: str,
    trace: Path | None,
    seed: int | None,
    out: Path | None,
    strategies: tuple[str, ...],
    write_outcomes: bool,
) -> None:
    """Run several strategies over the same trace and compare them."""
    console.print(f"\n[bold blue]Comparing strategies on: {config}[/bold blue]\n")
    try:
        loader = _loader(ctx)
        scenario, records = _scenario_and_trace(loader, config, trace, seed)
        specs = (
            [StrategySpec.parse(s) for s in strategies]
            if strategies
            else [StrategySpec(kind=kind) for kind in SELECTION_STRATEGIES]
        )
        factory = EngineFactory(loader)
        result = run_comparison(
            records,
            scenario,
            loader.load_matrix_config(scenario.matrix),
            specs,
            router=factory.create_router(scenario.routing),
            profiles=factory.load_profiles(required=False),
        )
        result.render(console)
        if out is not None:
            for path in result.write(out, write_outcomes=write_outcomes):
                console.print(f"Wrote [green]{path}[/green]")
    except Exception as e:
        console.print(f"[bold red]Error: {e}[/bold red]")
        sys.exit(1)


@cli.command("grid-search")
@click.option("--config", required=True, help="Scenario file under config/scenarios")
@click.option("--trace", type=click.Path(exists=True, path_type=Path), help="Validation trace")
@click.option("--seed", type=int, default=None, help="Override the scenario seed")
@click.option("--out", type=click.Path(path_type=Path), default=None, help="Output directory")
@click.option("--alphas", default=DEFAULT_GRID_VALUES, help="Comma-separated alpha values")
@click.option("--lambdas", default=DEFAULT_GRID_VALUES, help="Comma-separated lambda values")
@click.option("--mus", default=DEFAULT_GRID_VALUES, help="Comma-separated mu values")
@click.option(
    "--floor-ratio",
    type=float,
    default=DEFAULT_ACCURACY_FLOOR_RATIO,
    help="Accuracy floor for constrained objectives, relative to the best",
)
@click.pass_context
def grid_search_command(
    ctx: click.Context,
    config: str,
    trace: Path | None,
    seed: int | None,
    out: Path | None,
    alphas: str,
    lambdas: str,
    mus: str,
    floor_ratio: float,
) -> None:
    """Search operator weights per objective on a validation trace."""
    console.print(f"\n[bold blue]Grid search on: {config}[/bold blue]\n")
    try:
        loader = _loader(ctx)
        scenario, records = _scenario_and_trace(loader, config, trace, seed)
        grid = weight_grid(_floats(alphas), _floats(lambdas), _floats(mus))
        result = grid_search(
            records,
            scenario,
            loader.load_matrix_config(scenario.matrix),
            grid,
            router=EngineFactory(loader).create_router(scenario.routing),
            accuracy_floor_ratio=floor_ratio,
        )
        result.render(console)
        if out is not None:
            path = out / "grid_search.json"
            result.write_json(path)
            console.print(f"Wrote [green]{path}[/green]")
    except Exception as e:
        console.print(f"[bold red]Error: {e}[/bold red]")
        sys.exit(1)


@cli.command("train-classifier")
@click.option("--config", default=None, help="Scenario whose classifier_artifact is the target")
@click.option(
    "--trace",
    type=click.Path(exists=True, path_type=Path),
    help="Labeled JSONL corpus (a synthetic planted corpus if omitted)",
)
@click.option("--seed", type=int, default=0, help="Seed for split, shuffling and hashing")
@click.option("--out", type=click.Path(path_type=Path), default=None, help="Artifact path")
@click.option("--epochs", type=int, default=30, help="Training epochs")
@click.option("--batch-size", type=int, default=32, help="Mini-batch size")
@click.option("--learning-rate", type=float, default=0.5, help="Gradient step size")
@click.option("--dim", type=int, default=4096, help="Hashed feature dimension")
@click.option("--per-class", type=int, default=300, help="Planted corpus size per class")
@click.pass_context
def train_classifier(
    ctx: click.Context,
    config: str | None,
    trace: Path | None,
    seed: int,
    out: Path | None,
    epochs: int,
    batch_size: int,
    learning_rate: float,
    dim: int,
    per_class: int,
) -> None:
    """Train the reference semantic classifier and write its artifact."""
    console.print("\n[bold blue]Training reference classifier[/bold blue]\n")
    try:
        if out is None and config is not None:
            loader = _loader(ctx)
            artifact = loader.load_scenario_config(config).routing.classifier_artifact
            if artifact:
                out = Path(artifact)
                if not out.is_absolute():
                    out = loader.config_path / out
        out = out or Path(DEFAULT_ARTIFACT_NAME)

        texts, labels = read_corpus(trace) if trace else planted_corpus(per_class, seed)
        result = train_reference_classifier(
            texts,
            labels,
            epochs=epochs,
            batch_size=batch_size,
            learning_rate=learning_rate,
            seed=seed,
            dim=dim,
            out=out,
        )
        table = Table(title="Training Summary")
        table.add_column("Metric", style="cyan")
        table.add_column("Value", style="green")
        for key, value in result.to_dict().items():
            table.add_row(key, str(value))
        console.print(table)
    except Exception as e:
        console.print(f"[bold red]Error: {e}[/bold red]")
        sys.exit(1)


@cli.command("replay-gateway")
@click.option("--config", required=True, help="Gateway file under config/gateway")
@click.option("--trace", type=click.Path(exists=True, path_type=Path), help="JSONL trace to send")
@click.option("--seed", type=int, default=0, help="Seed of the generated trace")
@click.option("--out", type=click.Path(path_type=Path), default=None, help="Output directory")
@click.option("--url", default=None, help="Running gateway URL (in-process gateway if omitted)")
@click.option("--count", type=int, default=1000, help="Prompts to generate without --trace")
@click.option("--concurrency", type=int, default=DEFAULT_CONCURRENCY, help="Requests in flight")
@click.option("--profile", default=None, help="Operator profile for every request")
@click.option("--mode", type=click.Choice([m.value for m in RoutingMode]), default=None)
@click.option("--honor-offsets/--no-honor-offsets", default=False, help="Pace by arrival offsets")
@click.pass_context
def replay_gateway_command(
    ctx: click.Context,
    config: str,
    trace: Path | None,
    seed: int,
    out: Path | None,
    url: str | None,
    count: int,
    concurrency: int,
    profile: str | None,
    mode: str | None,
    honor_offsets: bool,
) -> None:
    """Send a trace through the gateway's HTTP API and report client-side metrics."""
    console.print(f"\n[bold blue]Replaying through gateway: {config}[/bold blue]\n")
    try:
        loader = _loader(ctx)
        gateway_config = loader.load_gateway_config(config)
        if trace is not None:
            records = read_trace(trace)
        else:
            arrivals = ArrivalConfig(kind=ArrivalKind.POISSON, rate=2.0, count=count)
            records = generate_trace(arrivals, horizon=float("inf"), seed=seed)

        transport = None
        if url is None:
            app = create_app(gateway_config, loader)
            transport = httpx.ASGITransport(app=app)
            url = "http://gateway"
        entries = gateway_config.routing.relevance.entries()
        result = replay_gateway(
            records,
            url,
            concurrency=concurrency,
            profile=profile,
            mode=RoutingMode(mode) if mode else None,
            honor_offsets=honor_offsets,
            relevance_table=RelevanceTable(entries=entries) if entries else None,
            transport=transport,
        )
        result.render(console)
        if out is not None:
            for path in result.write(out):
                console.print(f"Wrote [green]{path}[/green]")
            if trace is None:
                write_trace(records, out / "replay.trace.jsonl")
    except Exception as e:
        console.print(f"[bold red]Error: {e}[/bold red]")
        sys.exit(1)


@cli.command()
@click.option("--config", required=True, help="Gateway file under config/gateway")
@click.option("--host", default=None, help="Listen address (overrides the config)")
@click.option("--port", type=int, default=None, help="Listen port (overrides the config)")
@click.pass_context
def serve(ctx: click.Context, config: str, host: str | None, port: int | None) -> None:
    """Run the HTTP gateway."""
    try:
        loader = _loader(ctx)
        gateway_config = loader.load_gateway_config(config)
        app = create_app(gateway_config, loader)
        bind_host = host or gateway_config.host
        bind_port = port or gateway_config.port
        console.print(
            f"\n[bold blue]Gateway ({gateway_config.mode.value}) on "
            f"http://{bind_host}:{bind_port}[/bold blue]\n"
        )
        uvicorn.run(app, host=bind_host, port=bind_port, log_level=ctx.obj["log_level"].lower())
    except Exception as e:
        console.print(f"[bold red]Error: {e}[/bold red]")
        sys.exit(1)


@cli.command()
@click.pass_context
def validate(ctx: click.Context) -> None:
    """Validate every matrix, scenario and gateway configuration."""
    console.print("\n[bold blue]Validating configuration[/bold blue]\n")
    try:
        loader = _loader(ctx)
        try:
            profiles = loader.load_profiles()
        except FileNotFoundError:
            profiles = None
        results = ConfigValidator.validate_all(
            loader.load_all_matrices(),
            loader.load_all_scenarios(),
            loader.load_all_gateways(),
            profiles,
        )
        if not ConfigValidator.has_errors(results):
            console.print(
                f"[bold green]✓ {len(results)} configuration files are valid[/bold green]"
            )
            return
        console.print("[bold red]✗ Validation errors found:[/bold red]\n")
        for component, errors in results.items():
            if errors:
                console.print(f"[yellow]{component}:[/yellow]")
                for error in errors:
                    console.print(f"  • {error}")
        sys.exit(1)
    except Exception as e:
        console.print(f"[bold red]Error: {e}[/bold red]")
        sys.exit(1)


@cli.command()
@click.pass_context
def discover(ctx: click.Context) -> None:
    """List every configuration file by kind."""
    try:
        found = _loader(ctx).discover_all_configs()
        for kind, names in found.items():
            console.print(f"[cyan]{kind.capitalize()}:[/cyan] {len(names)}")
            for name in names:
                console.print(f"  • {name}")
    except Exception as e:
        console.print(f"[bold red]Error: {e}[/bold red]")
        sys.exit(1)


def main() -> None:
    """Main entry point."""
    cli(obj={})


if __name__ == "__main__":
    main()
