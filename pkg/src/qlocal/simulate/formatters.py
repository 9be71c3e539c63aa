from __future__ import annotations

from typing import Sequence

from rich.console import Console
from rich.table import Table

from qlocal.simulate.models import ExactComparison, SimulationResult
from qlocal.simulate.two_stage import LambdaSweep


def render_results_human(results: Sequence[SimulationResult], console: Console | None = None) -> None:
    active_console = console or Console()
    table = Table(title="Monte Carlo estimate")
    for column in ("scheme", "N", "trials", "seed", "mean F", "stderr", "N(1-F)"):
        table.add_column(column, justify="right")
    for result in results:
        table.add_row(
            result.scheme,
            str(result.copies),
            str(result.trials),
            str(result.seed),
            f"{result.mean:.8f}",
            f"{result.stderr:.2e}",
            f"{result.scaled_infidelity:.4f}",
        )
    active_console.print(table)
    for result in results:
        for note in result.notes:
            active_console.print(f"- N={result.copies}: {note}")


def render_comparison_human(comparison: ExactComparison, console: Console | None = None) -> None:
    active_console = console or Console()
    status = "[green]PASS[/green]" if comparison.passed else "[red]FAIL[/red]"
    active_console.print(
        f"{status} exact={comparison.reference:.8f} simulated={comparison.simulation.mean:.8f} "
        f"z={comparison.z_score:+.3f} (|z| <= {comparison.threshold:g})"
    )


def render_sweep_human(sweep: LambdaSweep, console: Console | None = None) -> None:
    active_console = console or Console()
    table = Table(title=f"Lambda sweep (N={sweep.plan.total_copies}, N0={sweep.plan.first_stage_copies})")
    for column in ("lambda", "mean F", "stderr", "estimate"):
        table.add_column(column, justify="right")
    for point in sweep.to_dict()["points"]:
        table.add_row(f"{point['lambda']:.3f}", f"{point['mean']:.8f}", f"{point['stderr']:.2e}", f"{point['estimate']:.8f}")
    active_console.print(table)
    active_console.print(f"best lambda {sweep.best_lambda:.3f}; predicted {sweep.predicted_lambda:.3f}")


__all__ = ["render_results_human", "render_comparison_human", "render_sweep_human"]
