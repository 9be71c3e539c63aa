from __future__ import annotations

from pathlib import Path

import typer
from rich.console import Console
from rich.table import Table

from qlocal.errors import UsageError
from qlocal.evaluate.series import EXACT_SCHEMES
from qlocal.fit.models import FidelitySeries, FitModel
from qlocal.fit.regression import DEFAULT_MIN_COPIES
from qlocal.fit.table import CoefficientTable, build_exact_series, coefficient_table, read_series, saturation_checks
from qlocal.utils.io import dumps_json, write_csv, write_json
from qlocal.utils.options import fail, parse_copies, parse_format

TABLE_FIELDS = (
    "scheme", "model", "fitted_c", "c_stderr", "target_c", "relative_deviation", "h", "d", "N_min", "N_max", "points"
)


def render_table_human(table: CoefficientTable, console: Console | None = None) -> None:
    active_console = console or Console()
    rendered = Table(title="Leading coefficient c in 1 - F ~ c/N")
    for column in ("scheme", "model", "fitted c", "+/-", "target c", "deviation %", "N range"):
        rendered.add_column(column, justify="right")
    for row in table.rows:
        rendered.add_row(
            row.fit.scheme,
            row.fit.model.value,
            f"{row.fit.c:.5f}",
            f"{row.fit.c_stderr:.1e}",
            f"{row.target:.5f}",
            f"{100.0 * row.deviation:+.2f}",
            f"{row.fit.min_copies}..{row.fit.max_copies}",
        )
    active_console.print(rendered)
    for check in saturation_checks(table):
        if check.passed is None:
            status = "[dim]SKIP[/dim]"
        else:
            status = "[green]PASS[/green]" if check.passed else "[red]FAIL[/red]"
        active_console.print(f"{status} {check.name}: {check.detail}")
    for note in table.notes:
        active_console.print(f"- {note}")


def fit_command(
    inputs: list[Path] | None = typer.Option(None, "--input", help="Ledger CSV or series CSV; repeatable."),
    scheme: str | None = typer.Option(None, "--scheme", help="Scheme to fit, e.g. 3d-og or two-stage."),
    exact: list[str] | None = typer.Option(None, "--exact", help="Build an exact series for this scheme; repeatable."),
    all_exact: bool = typer.Option(False, "--all-exact", help="Build exact series for every exact scheme."),
    copies: str | None = typer.Option(None, "--n", help="N range for exact series; defaults to a grid per scheme."),
    model: str = typer.Option(
        "auto", "--model", help="Model: c, c,d (adds d/N^2), c,h,d (adds h/N^(3/2) too) or auto (per scheme)."
    ),
    min_copies: int = typer.Option(DEFAULT_MIN_COPIES, "--min-n", help="Smallest N used by the fit."),
    json_output: bool = typer.Option(False, "--json", help="Print the table as JSON to stdout."),
    output: Path | None = typer.Option(None, "--output", help="Write the coefficient table to this file."),
    output_format: str = typer.Option("csv", "--format", help="File format for --output: csv or json."),
    verbose: bool = typer.Option(False, "--verbose", help="Print tracebacks on errors."),
) -> None:
    try:
        fmt = parse_format(output_format)
        chosen = None if model.strip().lower() == "auto" else FitModel.parse(model)
        loaded: dict[str, FidelitySeries] = {}
        for path in inputs or []:
            for series in read_series(path, scheme):
                loaded[series.scheme] = series
        exact_schemes = list(EXACT_SCHEMES) if all_exact else list(exact or [])
        if exact_schemes:
            values = parse_copies(copies) if copies is not None else None
            for name in exact_schemes:
                series = build_exact_series(name, values)
                loaded[series.scheme] = series
        if not loaded:
            raise UsageError("nothing to fit; pass --input, --exact or --all-exact")

        wanted = [scheme] if scheme else None
        table = coefficient_table(loaded, wanted, chosen, min_copies)
        payload = table.to_dict()
        if json_output:
            typer.echo(dumps_json(payload), nl=False)
        else:
            render_table_human(table)

        if output is not None:
            if fmt == "csv":
                write_csv([row.to_dict() for row in table.rows], TABLE_FIELDS, output)
            else:
                write_json(payload, output)
            typer.echo(f"Coefficient table written: {output}", err=True)
        raise typer.Exit(code=0)
    except typer.Exit:
        raise
    except Exception as exc:  # noqa: BLE001
        fail(exc, verbose)


__all__ = ["fit_command", "render_table_human"]
