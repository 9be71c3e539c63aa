from __future__ import annotations

from pathlib import Path

import typer

from qlocal.core.bloch import Prior
from qlocal.errors import UsageError
from qlocal.evaluate.bounds import GapRow, cm_bound, fidelity_gap_table, verify_bound_ordering
from qlocal.evaluate.dispatch import default_prior, evaluate_strategy
from qlocal.evaluate.formatters import (
    BOUND_FIELDS,
    SERIES_FIELDS,
    bound_rows,
    render_bounds_human,
    render_gap_human,
    render_ordering_human,
    render_report_human,
    render_series_human,
    series_rows,
    write_report_csv,
    write_report_json,
)
from qlocal.evaluate.models import EvaluationCaps
from qlocal.evaluate.series import EXACT_SCHEMES, default_copies, exact_series, parse_scheme
from qlocal.evaluate.tree import eval_adaptive_tree
from qlocal.strategy.guesses import GuessKind, TomographicGuess
from qlocal.strategy.models import FixedAxesPlan
from qlocal.strategy.serialization import load_strategy, strategy_hash
from qlocal.utils.io import dumps_json, write_csv, write_json
from qlocal.utils.options import RunConfig, fail, parse_copies, parse_format


def _gap_rows(scheme: str, values: list[int]) -> tuple[GapRow, ...]:
    name = parse_scheme(scheme)
    prior, rule = EXACT_SCHEMES[name]
    if rule is None:
        raise UsageError(f"{name} is a collective bound; --gap needs a local scheme")
    local = {point.copies: point.fidelity for point in exact_series(name, values)}
    return fidelity_gap_table(local, prior)


def bounds_command(
    copies: str = typer.Option("1..10", "--n", help="Copy counts: a..b, a..b:step or a comma list."),
    prior: str = typer.Option("3d", "--prior", help="Prior: 2d (equator) or 3d (full sphere)."),
    check_ordering: bool = typer.Option(False, "--check-ordering", help="Also check that the 2D bound exceeds the 3D bound."),
    gap: str | None = typer.Option(
        None, "--gap", help="Compare an exact local scheme (2d-t, 2d-og, 3d-t or 3d-og) with the bound of its prior."
    ),
    json_output: bool = typer.Option(False, "--json", help="Print JSON to stdout instead of a table."),
    output: Path | None = typer.Option(None, "--output", help="Write the table to this file."),
    output_format: str = typer.Option("csv", "--format", help="File format for --output: csv or json."),
    verbose: bool = typer.Option(False, "--verbose", help="Print tracebacks on errors."),
) -> None:
    try:
        values = parse_copies(copies)
        resolved = Prior.parse(prior)
        fmt = parse_format(output_format)
        rows = [(n, cm_bound(resolved, n)) for n in values]
        ordering = verify_bound_ordering(max(values)) if check_ordering else None
        gap_rows = _gap_rows(gap, values) if gap is not None else None

        if json_output:
            payload = {"prior": resolved.value, "rows": bound_rows(rows)}
            if ordering is not None:
                payload["ordering_holds"] = ordering.ordering_holds
            if gap_rows is not None:
                payload["gap"] = {"scheme": parse_scheme(gap), "rows": [row.to_dict() for row in gap_rows]}
            typer.echo(dumps_json(payload), nl=False)
        else:
            render_bounds_human(rows, resolved.value)
            if ordering is not None:
                render_ordering_human(ordering.rows)
            if gap_rows is not None:
                render_gap_human(gap_rows)

        if output is not None:
            if fmt == "csv":
                write_csv(bound_rows(rows), BOUND_FIELDS, output)
            else:
                write_json({"prior": resolved.value, "rows": bound_rows(rows)}, output)
            typer.echo(f"Bounds written: {output}", err=True)
        if ordering is not None and not ordering.passed:
            raise typer.Exit(code=1)
        raise typer.Exit(code=0)
    except typer.Exit:
        raise
    except Exception as exc:  # noqa: BLE001
        fail(exc, verbose)


def eval_command(
    strategy_file: Path = typer.Argument(..., help="Strategy JSON file (adaptive-tree or fixed-axes)."),
    prior: str | None = typer.Option(None, "--prior", help="Prior: 2d or 3d. Defaults to 2d for planar strategies."),
    guess: str = typer.Option("optimal", "--guess", help="Guess rule: optimal (og) or tomographic (t)."),
    bit_strings: bool = typer.Option(False, "--bit-strings", help="Evaluate fixed-axes plans through their equivalent tree."),
    max_depth: int = typer.Option(16, "--max-depth", help="Largest tree depth evaluated exactly."),
    max_repetitions: int | None = typer.Option(None, "--max-repetitions", help="Largest repetitions per axis for fixed-axes plans."),
    no_outcomes: bool = typer.Option(False, "--no-outcomes", help="Leave per-outcome records out of the report."),
    threads: int | None = typer.Option(None, "--threads", help="Worker threads; default is the logical CPU count."),
    json_output: bool = typer.Option(False, "--json", help="Print the report as JSON to stdout."),
    output: Path | None = typer.Option(None, "--output", help="Write the report to this file."),
    output_format: str = typer.Option("json", "--format", help="File format for --output: json or csv (one row per outcome)."),
    verbose: bool = typer.Option(False, "--verbose", help="Print tracebacks on errors."),
) -> None:
    try:
        fmt = parse_format(output_format)
        strategy = load_strategy(strategy_file)
        resolved = Prior.parse(prior) if prior else default_prior(strategy)
        rule = GuessKind.parse(guess)
        defaults = EvaluationCaps()
        caps = EvaluationCaps(
            max_tree_depth=max_depth,
            max_repetitions_3d=max_repetitions or defaults.max_repetitions_3d,
            max_repetitions_2d=max_repetitions or defaults.max_repetitions_2d,
        )
        include = not no_outcomes or fmt == "csv"
        if bit_strings and isinstance(strategy, FixedAxesPlan):
            tree_rule = TomographicGuess(strategy) if rule is GuessKind.TOMOGRAPHIC else None
            report = eval_adaptive_tree(
                strategy.to_tree(), resolved, guess=tree_rule, caps=caps, threads=threads, include_outcomes=include
            )
        else:
            report = evaluate_strategy(strategy, resolved, rule, caps=caps, threads=threads, include_outcomes=include)

        config = RunConfig(
            command="eval",
            copies=(report.copies,),
            prior=resolved,
            strategy=str(strategy_file),
            threads=threads,
            output=output,
            output_format=fmt,
        )
        extra = {"strategy_hash": strategy_hash(strategy), "run": config.to_dict()}
        if json_output:
            payload = report.to_dict(include_outcomes=not no_outcomes)
            payload.update(extra)
            typer.echo(dumps_json(payload), nl=False)
        else:
            render_report_human(report)

        if output is not None:
            if fmt == "csv":
                write_report_csv(report, output)
            else:
                write_report_json(report, output, extra=extra)
            typer.echo(f"Report written: {output}", err=True)
        raise typer.Exit(code=0)
    except typer.Exit:
        raise
    except Exception as exc:  # noqa: BLE001
        fail(exc, verbose)


def series_command(
    scheme: str = typer.Option(..., "--scheme", help="Scheme: 2d-cm, 3d-cm, 2d-t, 2d-og, 3d-t or 3d-og."),
    copies: str | None = typer.Option(
        None, "--n", help="Copy counts; values a fixed-axes scheme cannot realize are skipped. Defaults to a grid per scheme."
    ),
    max_repetitions: int | None = typer.Option(None, "--max-repetitions", help="Raise the fixed-axes repetition cap."),
    json_output: bool = typer.Option(False, "--json", help="Print JSON to stdout instead of a table."),
    output: Path | None = typer.Option(None, "--output", help="Write the series to this file."),
    output_format: str = typer.Option("csv", "--format", help="File format for --output: csv or json."),
    verbose: bool = typer.Option(False, "--verbose", help="Print tracebacks on errors."),
) -> None:
    try:
        name = parse_scheme(scheme)
        fmt = parse_format(output_format)
        caps = EvaluationCaps()
        if max_repetitions is not None:
            caps = EvaluationCaps(max_repetitions_3d=max_repetitions, max_repetitions_2d=max_repetitions)
        values = parse_copies(copies) if copies is not None else default_copies(name, caps)
        points = exact_series(name, values, caps=caps)
        skipped = len(values) - len(points)
        if skipped:
            typer.echo(f"skipped {skipped} N value(s) that {name} cannot realize", err=True)

        payload = {"scheme": name, "source": "exact", "points": series_rows(points)}
        if json_output:
            typer.echo(dumps_json(payload), nl=False)
        else:
            render_series_human(name, points)

        if output is not None:
            if fmt == "csv":
                write_csv(series_rows(points), SERIES_FIELDS, output)
            else:
                write_json(payload, output)
            typer.echo(f"Series written: {output}", err=True)
        raise typer.Exit(code=0)
    except typer.Exit:
        raise
    except Exception as exc:  # noqa: BLE001
        fail(exc, verbose)


__all__ = ["bounds_command", "eval_command", "series_command"]
