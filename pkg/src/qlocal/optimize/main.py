from __future__ import annotations

from pathlib import Path

import typer

from qlocal.core.bloch import Prior
from qlocal.optimize.formatters import render_optimization_human, render_structure_human
from qlocal.optimize.models import OptimizationConfig
from qlocal.optimize.search import optimize_tree
from qlocal.optimize.structure import structure_report
from qlocal.strategy.serialization import dump_strategy
from qlocal.utils.io import DEFAULT_OUTPUT_DIR, dumps_json, write_json
from qlocal.utils.options import EXIT_NOT_CONVERGED, fail, resolve_seed


def meta_path_for(output: Path) -> Path:
    return output.with_name(output.stem + ".meta.json")


def optimize_command(
    copies: int = typer.Option(..., "--n", help="Tree depth N (number of copies), at most 8."),
    prior: str = typer.Option("3d", "--prior", help="Prior: 2d or 3d."),
    restarts: int = typer.Option(20, "--restarts", help="Number of seeded restarts."),
    max_iterations: int = typer.Option(20000, "--max-iterations", help="Simplex iterations per restart."),
    tolerance: float = typer.Option(1e-10, "--tolerance", help="Convergence tolerance on F."),
    no_gauge: bool = typer.Option(False, "--no-gauge", help="Optimize every angle, without pinning the root."),
    no_refine: bool = typer.Option(False, "--no-refine", help="Skip the gradient polish after the simplex search."),
    seed: int | None = typer.Option(None, "--seed", help="Base seed; generated and echoed when absent."),
    threads: int | None = typer.Option(None, "--threads", help="Restarts run in parallel on this many threads."),
    structure: bool = typer.Option(False, "--structure", help="Also print the structure report of the best tree."),
    json_output: bool = typer.Option(False, "--json", help="Print the result as JSON to stdout."),
    output: Path | None = typer.Option(None, "--output", help="Strategy JSON path; a .meta.json sidecar is written next to it."),
    no_write: bool = typer.Option(False, "--no-write", help="Do not write the strategy files."),
    verbose: bool = typer.Option(False, "--verbose", help="Print tracebacks on errors."),
) -> None:
    try:
        resolved = Prior.parse(prior)
        config = OptimizationConfig(
            restarts=restarts,
            max_iterations=max_iterations,
            tolerance=tolerance,
            gauge_fixed=not no_gauge,
            seed=resolve_seed(seed),
            refine=not no_refine,
        )
        result = optimize_tree(copies, resolved, config, threads=threads)
        report = structure_report(result.tree, resolved) if structure else None

        if json_output:
            payload = result.to_dict()
            if report is not None:
                payload["structure"] = report.to_dict()
            typer.echo(dumps_json(payload), nl=False)
        else:
            render_optimization_human(result)
            if report is not None:
                render_structure_human(report)

        if not no_write:
            target = output or DEFAULT_OUTPUT_DIR / f"tree_{resolved.value}_N{copies}.json"
            dump_strategy(result.tree, target)
            meta = result.meta_dict()
            meta["report"] = result.report.to_dict(include_outcomes=False)
            if report is not None:
                meta["structure"] = report.to_dict()
            write_json(meta, meta_path_for(target))
            typer.echo(f"Strategy written: {target}", err=True)

        if not result.converged:
            typer.echo("best restart did not converge; best-so-far result kept", err=True)
            raise typer.Exit(code=EXIT_NOT_CONVERGED)
        raise typer.Exit(code=0)
    except typer.Exit:
        raise
    except Exception as exc:  # noqa: BLE001
        fail(exc, verbose)


__all__ = ["optimize_command", "meta_path_for"]
