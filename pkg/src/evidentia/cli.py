"""Command-line front end.

Exit codes: 0 ok, 2 validation failure, 3 evaluation error, 4 oracle mismatch
(including starved cells).
"""

import sys

import click

from . import loader, report
from .errors import EvidentiaError, InsufficientSamples
from .oracle import compare, simulate as run_simulation
from .scenario import evaluate

EXIT_OK, EXIT_VALIDATION, EXIT_EVALUATION, EXIT_MISMATCH = 0, 2, 3, 4

_format = click.option("--format", "fmt", type=click.Choice(["table", "machine"]), default="table",
                       show_default=True)


def _load(path):
    try:
        return loader.load(path)
    except loader.ValidationFailed as exc:
        for d in exc.diagnostics:
            click.echo(f"{path}: {d}", err=True)
        sys.exit(EXIT_VALIDATION)


def _fail(exc: EvidentiaError, code: int, fmt: str):
    if fmt == "machine":
        click.echo(report.to_machine({"error": {"code": exc.code, "message": exc.message}}), nl=False)
    click.echo(f"error: {exc}", err=True)
    sys.exit(code)


@click.group()
@click.version_option(package_name="artifact")
def main():
    """Evaluate profiling vs case-specific evidence with likelihood ratios."""


@main.command()
@click.argument("path", type=click.Path(dir_okay=False))
def validate(path):
    """Check a scenario file against the schema and model invariants."""
    _load(path)
    click.echo(f"{path}: ok")


@main.command()
@click.argument("path", type=click.Path(dir_okay=False))
@_format
def analyze(path, fmt):
    """Evaluate the scenario and print posteriors at both hypothesis levels."""
    sf = _load(path)
    try:
        d = report.analysis_dict(sf, evaluate(sf.scenario))
    except EvidentiaError as exc:
        _fail(exc, EXIT_EVALUATION, fmt)
    click.echo(report.to_machine(d) if fmt == "machine" else report.render_analysis(d), nl=False)


@main.command()
@click.argument("path", type=click.Path(dir_okay=False))
@click.option("--seed", type=click.IntRange(0, 2**64 - 1), envvar="EVIDENTIA_SEED",
              help="Master seed (default: $EVIDENTIA_SEED, then the file).")
@click.option("--samples", type=click.IntRange(min=1), help="Population size per replication.")
@click.option("--replications", type=click.IntRange(min=1))
@_format
def simulate(path, seed, samples, replications, fmt):
    """Run the Monte Carlo oracle and compare it with the analytic values."""
    sf = _load(path)
    try:
        cfg = sf.simulation_config(seed=seed, population_size=samples, replications=replications)
    except loader.ValidationFailed as exc:
        for d in exc.diagnostics:
            click.echo(f"{path}: {d}", err=True)
        sys.exit(EXIT_VALIDATION)
    except EvidentiaError as exc:
        _fail(exc, EXIT_VALIDATION, fmt)
    try:
        stats = run_simulation(cfg)
        rows = compare(cfg, stats)
    except InsufficientSamples as exc:
        _fail(exc, EXIT_MISMATCH, fmt)
    except EvidentiaError as exc:
        _fail(exc, EXIT_EVALUATION, fmt)
    d = report.comparison_dict(cfg, stats, rows)
    click.echo(report.to_machine(d) if fmt == "machine" else report.render_comparison(d), nl=False)
    sys.exit(EXIT_OK if d["all_passed"] else EXIT_MISMATCH)


if __name__ == "__main__":
    main()
