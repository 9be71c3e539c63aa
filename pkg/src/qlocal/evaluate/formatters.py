from __future__ import annotations

from pathlib import Path
from typing import Any, Iterable, Sequence

from rich.console import Console
from rich.table import Table

from qlocal.evaluate.bounds import BoundRow, GapRow
from qlocal.evaluate.models import FidelityReport, SeriesPoint
from qlocal.utils.io import rows_to_csv, write_csv, write_json

OUTCOME_FIELDS = ("outcome", "probability", "posterior_norm", "guess_x", "guess_y", "guess_z", "score", "tie_break")
SERIES_FIELDS = ("N", "fidelity", "scaled_infidelity", "stderr")
BOUND_FIELDS = ("N", "fidelity", "scaled_infidelity")
_MAX_HUMAN_OUTCOMES = 32


def outcome_rows(report: FidelityReport) -> list[dict[str, Any]]:
    rows = []
    for record in report.outcomes:
        rows.append(
            {
                "outcome": record.outcome,
                "probability": repr(record.probability),
                "posterior_norm": repr(record.posterior_norm),
                "guess_x": repr(record.guess[0]),
                "guess_y": repr(record.guess[1]),
                "guess_z": repr(record.guess[2]),
                "score": repr(record.score),
                "tie_break": int(record.tie_break),
            }
        )
    return rows


def report_to_csv(report: FidelityReport) -> str:
    return rows_to_csv(outcome_rows(report), OUTCOME_FIELDS)


def write_report_csv(report: FidelityReport, path: Path) -> Path:
    return write_csv(outcome_rows(report), OUTCOME_FIELDS, path)


def write_report_json(report: FidelityReport, path: Path, extra: dict[str, Any] | None = None) -> Path:
    payload = report.to_dict()
    if extra:
        payload.update(extra)
    return write_json(payload, path)


def series_rows(points: Iterable[SeriesPoint]) -> list[dict[str, Any]]:
    return [{key: repr(value) if isinstance(value, float) else value for key, value in point.to_dict().items()} for point in points]


def bound_rows(prior_values: Sequence[tuple[int, float]]) -> list[dict[str, Any]]:
    return [{"N": n, "fidelity": repr(f), "scaled_infidelity": repr(n * (1.0 - f))} for n, f in prior_values]


def render_report_human(report: FidelityReport, console: Console | None = None) -> None:
    active_console = console or Console()
    table = Table(title=f"Exact fidelity: {report.strategy} ({report.prior.value}, N={report.copies})")
    table.add_column("Quantity", no_wrap=True)
    table.add_column("Value", overflow="fold")
    table.add_row("guess rule", report.guess_rule)
    table.add_row("F", f"{report.fidelity:.10f}")
    table.add_row("N(1-F)", f"{report.scaled_infidelity:.6f}")
    table.add_row("sum p", f"{report.total_probability:.15f}")
    table.add_row("outcomes", str(len(report.outcomes)))
    active_console.print(table)

    if report.outcomes and len(report.outcomes) <= _MAX_HUMAN_OUTCOMES:
        detail = Table(title="Outcomes")
        for column in ("outcome", "p", "|V|", "guess", "score"):
            detail.add_column(column, overflow="fold")
        for record in report.outcomes:
            guess = ", ".join(f"{value:+.4f}" for value in record.guess)
            marker = " *" if record.tie_break else ""
            detail.add_row(record.outcome, f"{record.probability:.6f}", f"{record.posterior_norm:.6f}", guess + marker, f"{record.score:.6f}")
        active_console.print(detail)

    for note in report.notes:
        active_console.print(f"- {note}")


def render_bounds_human(rows: Sequence[tuple[int, float]], prior_label: str, console: Console | None = None) -> None:
    active_console = console or Console()
    table = Table(title=f"Collective-measurement bound ({prior_label})")
    table.add_column("N", justify="right")
    table.add_column("F_CM", justify="right")
    table.add_column("N(1-F_CM)", justify="right")
    for n, fidelity in rows:
        table.add_row(str(n), f"{fidelity:.6f}", f"{n * (1.0 - fidelity):.6f}")
    active_console.print(table)


def render_ordering_human(rows: Sequence[BoundRow], console: Console | None = None) -> None:
    active_console = console or Console()
    failures = [row.copies for row in rows if not row.ordered]
    if failures:
        active_console.print(f"[red]2D bound not above 3D bound at N = {failures}[/red]")
    else:
        active_console.print(f"[green]2D bound above 3D bound for N = 1..{len(rows)}[/green]")


def render_series_human(scheme: str, points: Sequence[SeriesPoint], console: Console | None = None) -> None:
    active_console = console or Console()
    table = Table(title=f"Exact series: {scheme}")
    table.add_column("N", justify="right")
    table.add_column("F", justify="right")
    table.add_column("N(1-F)", justify="right")
    for point in points:
        table.add_row(str(point.copies), f"{point.fidelity:.10f}", f"{point.scaled_infidelity:.6f}")
    active_console.print(table)


def render_gap_human(rows: Sequence[GapRow], console: Console | None = None) -> None:
    active_console = console or Console()
    table = Table(title="Local optimum against the collective bound")
    for column in ("N", "F_local", "N(1-F_local)", "F_CM", "N(1-F_CM)", "gap %"):
        table.add_column(column, justify="right")
    for row in rows:
        table.add_row(
            str(row.copies),
            f"{row.local_fidelity:.6f}",
            f"{row.copies * (1.0 - row.local_fidelity):.4f}",
            f"{row.cm_fidelity:.6f}",
            f"{row.copies * (1.0 - row.cm_fidelity):.4f}",
            f"{100.0 * row.relative_gap:.2f}",
        )
    active_console.print(table)


__all__ = [
    "OUTCOME_FIELDS",
    "SERIES_FIELDS",
    "BOUND_FIELDS",
    "outcome_rows",
    "report_to_csv",
    "write_report_csv",
    "write_report_json",
    "series_rows",
    "bound_rows",
    "render_report_human",
    "render_bounds_human",
    "render_ordering_human",
    "render_series_human",
    "render_gap_human",
]
