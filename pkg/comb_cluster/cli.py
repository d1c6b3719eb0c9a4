"""Command-line interface for the comb cluster-state pipeline.

Every command reads one configuration file (JSON or TOML). Exit codes: 0 when all
verdicts pass, 2 when a verification check fails, 1 on any error.
"""
from __future__ import annotations

import json
import sys
from pathlib import Path
from typing import List, Optional

try:
    import typer
    from rich.console import Console
    from rich.table import Table
except ImportError:
    typer = None
    Console = None
    Table = None

from comb_cluster import __version__, get_settings
from comb_cluster.adapters.config_loader import ExportSelector, PipelineConfig, load_config
from comb_cluster.adapters.exporters import to_json, write_text_atomic
from comb_cluster.domain import CombClusterError, ComponentLevel
from comb_cluster.observability import configure_structured_logging
from comb_cluster.services.hgraph_service import (
    build_hgraph,
    components,
    edge_records,
    matching_projector_check,
)
from comb_cluster.services.pipeline_service import RunState, get_pipeline_service

EXIT_PASS = 0
EXIT_ERROR = 1
EXIT_VERIFICATION_FAILED = 2

app = typer.Typer(name="comb-cluster", help="Frequency-comb hypercubic cluster-state simulator")
console = Console() if Console else None
err_console = Console(stderr=True) if Console else None

CONFIG_OPTION = typer.Option(..., "--config", "-c", help="Configuration file (.json or .toml)")
OUT_OPTION = typer.Option(None, "--out", "-o", help="Output directory for artifacts")
SEED_OPTION = typer.Option(None, "--seed", help="Override the configured sampling seed")
JSON_OPTION = typer.Option(False, "--json", help="Print the verification report as JSON")


def _fail(message: str) -> typer.Exit:
    if err_console:
        err_console.print(f"[red]Error: {message}[/red]")
    else:
        print(f"Error: {message}", file=sys.stderr)
    return typer.Exit(EXIT_ERROR)


def _load(config_path: Path, seed: Optional[int]) -> PipelineConfig:
    config = load_config(config_path)
    if seed is not None:
        if seed < 0:
            raise _fail("--seed must be nonnegative")
        config = config.model_copy(update={"seed": seed})
    return config


def _print_summary(state: RunState) -> None:
    summary = state.summary
    if console is None or Table is None:
        for name, ok in sorted(summary.verdicts.items()):
            print(f"{name}: {'pass' if ok else 'FAIL'}")
        return
    title = f"Run {summary.run_id}: {summary.num_modes} modes, D={summary.config.dimension}"
    table = Table(title=title)
    table.add_column("check")
    table.add_column("verdict")
    for name, ok in sorted(summary.verdicts.items()):
        table.add_row(name, "[green]pass[/green]" if ok else "[red]FAIL[/red]")
    for stage in summary.skipped:
        table.add_row(stage, "[yellow]skipped[/yellow]")
    console.print(table)
    if summary.nullifier_deviation:
        worst = max(summary.nullifier_deviation.values())
        console.print(f"max |analytic - numeric| nullifier covariance: {worst:.3e}")
    if summary.lattice is not None:
        for line in summary.lattice.diagnostics:
            console.print(f"[red]{line}[/red]")
    for path in summary.written:
        console.print(f"[green]wrote {path}[/green]")


def _execute(
    config_path: Path,
    out: Optional[Path],
    seed: Optional[int],
    selectors: Optional[List[ExportSelector]],
    as_json: bool,
) -> None:
    try:
        config = _load(config_path, seed)
        state = get_pipeline_service().run(
            config, out_dir=out, base_dir=config_path.parent, selectors=selectors
        )
    except CombClusterError as exc:
        raise _fail(str(exc)) from exc

    if as_json:
        print(to_json(state.summary.to_report()), end="")
    else:
        _print_summary(state)
    raise typer.Exit(EXIT_PASS if state.summary.passed else EXIT_VERIFICATION_FAILED)


@app.callback()
def _configure() -> None:
    settings = get_settings()
    configure_structured_logging(json_logs=settings.JSON_LOGS, level=settings.LOG_LEVEL)


@app.command()
def run(
    config: Path = CONFIG_OPTION,
    out: Optional[Path] = OUT_OPTION,
    seed: Optional[int] = SEED_OPTION,
    as_json: bool = JSON_OPTION,
) -> None:
    """Run the full pipeline and write the configured exports to --out."""
    _execute(config, out, seed, None, as_json)


@app.command()
def verify(
    config: Path = CONFIG_OPTION,
    seed: Optional[int] = SEED_OPTION,
    as_json: bool = JSON_OPTION,
) -> None:
    """Run every check without writing artifacts."""
    _execute(config, None, seed, [], as_json)


@app.command()
def report(
    config: Path = CONFIG_OPTION,
    out: Optional[Path] = OUT_OPTION,
    seed: Optional[int] = SEED_OPTION,
) -> None:
    """Print the JSON verification report; with --out also write report.json."""
    selectors = [ExportSelector.REPORT] if out is not None else []
    _execute(config, out, seed, selectors, True)


@app.command()
def export(
    config: Path = CONFIG_OPTION,
    out: Path = typer.Option(..., "--out", "-o", help="Output directory for artifacts"),
    seed: Optional[int] = SEED_OPTION,
) -> None:
    """Run the pipeline and write every artifact family."""
    _execute(config, out, seed, list(ExportSelector), False)


@app.command()
def validate(config: Path = CONFIG_OPTION) -> None:
    """Check a configuration file without running the pipeline."""
    try:
        parsed = load_config(config)
    except CombClusterError as exc:
        raise _fail(str(exc)) from exc
    window = parsed.comb_window
    message = (
        f"valid: D={parsed.dimension}, M={parsed.copies}, "
        f"window n in [{window.n_min}, {window.n_max}], "
        f"{2 * parsed.dimension * window.size} modes"
    )
    if console:
        console.print(f"[green]{message}[/green]")
    else:
        print(message)


@app.command()
def build(
    config: Path = CONFIG_OPTION,
    out: Optional[Path] = OUT_OPTION,
) -> None:
    """Build the H-graph and summarize its matching and components."""
    try:
        parsed = load_config(config)
        g = build_hgraph(parsed.specs(), parsed.comb_window)
        matched, ok = matching_projector_check(g)
        chains = components(g, ComponentLevel.MACRONODE)
        if out is not None:
            payload = {"edges": edge_records(g), "unmatched": list(g.unmatched)}
            write_text_atomic(Path(out) / "hgraph.json", to_json(payload))
    except CombClusterError as exc:
        raise _fail(str(exc)) from exc

    summary = {
        "modes": g.num_modes,
        "edges": len(g.edges),
        "matched": matched,
        "unmatched": len(g.unmatched),
        "matching": ok,
        "macronode_components": len(chains),
    }
    if console:
        console.print_json(json.dumps(summary))
    else:
        print(json.dumps(summary))
    raise typer.Exit(EXIT_PASS if ok else EXIT_VERIFICATION_FAILED)


@app.command()
def version() -> None:
    """Show version information."""
    print(f"comb-cluster v{__version__}")


def main() -> None:
    """Entry point for the CLI application."""
    if typer is None:
        print("Error: typer and rich are required for CLI functionality.")
        print("Install with: pip install typer rich")
        sys.exit(1)

    app()


if __name__ == "__main__":
    main()
