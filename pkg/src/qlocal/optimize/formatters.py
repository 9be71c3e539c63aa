from __future__ import annotations

from rich.console import Console
from rich.table import Table

from qlocal.evaluate.bounds import cm_bound
from qlocal.optimize.models import OptimizationResult
from qlocal.optimize.structure import StructureReport


def _fmt(value: float | None) -> str:
    return "-" if value is None else f"{value:.3f}"


def render_optimization_human(result: OptimizationResult, console: Console | None = None) -> None:
    active_console = console or Console()
    report = result.report
    bound = cm_bound(report.prior, report.copies)
    table = Table(title=f"Optimized tree ({report.prior.value}, N={report.copies})")
    table.add_column("Quantity", no_wrap=True)
    table.add_column("Value", overflow="fold")
    table.add_row("F", f"{report.fidelity:.10f}")
    table.add_row("N(1-F)", f"{report.scaled_infidelity:.6f}")
    table.add_row("F_CM", f"{bound:.10f}")
    table.add_row("seed", str(result.seed))
    table.add_row("best restart", f"{result.best_restart} ({result.restarts[result.best_restart].initializer})")
    table.add_row("iterations", str(result.iterations))
    table.add_row("converged", "[green]yes[/green]" if result.converged else "[yellow]no[/yellow]")
    active_console.print(table)

    restarts = Table(title="Restarts")
    for column in ("#", "init", "F", "iterations", "converged"):
        restarts.add_column(column)
    for outcome in result.restarts:
        restarts.add_row(
            str(outcome.index), outcome.initializer, f"{outcome.fidelity:.10f}", str(outcome.iterations), str(outcome.converged)
        )
    active_console.print(restarts)
    for note in result.notes:
        active_console.print(f"- {note}")


def render_structure_human(report: StructureReport, console: Console | None = None) -> None:
    active_console = console or Console()
    table = Table(title="Tree structure")
    for column in ("step", "angle to guess min", "max", "mean", "same-depth spread"):
        table.add_column(column, justify="right")
    for step in report.steps:
        table.add_row(
            str(step.step),
            _fmt(step.guess_angle_min_deg),
            _fmt(step.guess_angle_max_deg),
            _fmt(step.guess_angle_mean_deg),
            f"{step.max_same_depth_angle_deg:.3f}",
        )
    active_console.print(table)
    active_console.print(f"history dependent: {report.history_dependent}")
    active_console.print(f"max angle between optimal guess and direction sum: {report.max_sum_guess_deviation_deg:.3f} deg")
    for note in report.notes:
        active_console.print(f"- {note}")


__all__ = ["render_optimization_human", "render_structure_human"]
