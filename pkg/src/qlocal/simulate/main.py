from __future__ import annotations

from pathlib import Path

import typer

from qlocal.core.bloch import Prior
from qlocal.errors import UsageError
from qlocal.simulate.formatters import render_comparison_human, render_results_human, render_sweep_human
from qlocal.simulate.ledger import DEFAULT_LEDGER, LEDGER_FIELDS, append_results
from qlocal.simulate.models import DEFAULT_BLOCK_SIZE, SimulationResult
from qlocal.simulate.runner import compare_exact, simulate
from qlocal.simulate.two_stage import simulate_two_stage, sweep_lambda
from qlocal.strategy.models import TwoStagePlan
from qlocal.strategy.serialization import load_strategy
from qlocal.utils.io import dumps_json, write_csv, write_json
from qlocal.utils.options import RunConfig, fail, parse_copies, parse_format, parse_trials, resolve_seed


def _parse_lambdas(raw: str) -> list[float]:
    try:
        values = [float(item) for item in raw.split(",") if item.strip()]
    except ValueError as exc:
        raise UsageError(f"bad lambda list {raw!r}") from exc
    if not values:
        raise UsageError("empty lambda list")
    return values


def _two_stage_plan(copies: int, n0: int | None, beta: float, lam: float) -> TwoStagePlan:
    if n0 is not None:
        return TwoStagePlan(copies, n0, lam=lam)
    return TwoStagePlan.from_beta(copies, beta=beta, lam=lam)


def simulate_command(
    strategy_file: Path | None = typer.Option(None, "--strategy", help="Strategy JSON file (any kind)."),
    two_stage: bool = typer.Option(False, "--two-stage", help="Run the two-stage scheme built from --n, --beta and --lambda."),
    copies: str | None = typer.Option(None, "--n", help="Total copies for --two-stage; a range runs one simulation per N."),
    beta: float = typer.Option(0.5, "--beta", help="First-stage exponent: N0 is round(N**beta), moved by one when N - N0 is odd."),
    n0: int | None = typer.Option(None, "--n0", help="Explicit first-stage size (at least 3, N - N0 even)."),
    lam: float = typer.Option(1.0, "--lambda", help="Second-stage correction weight."),
    sweep: str | None = typer.Option(None, "--sweep", help="Comma list of lambdas to sweep for --two-stage."),
    prior: str | None = typer.Option(None, "--prior", help="Prior for --strategy: 2d or 3d."),
    guess: str = typer.Option("optimal", "--guess", help="Guess rule for --strategy: optimal or tomographic."),
    trials: str = typer.Option("100000", "--trials", help="Number of trials; scientific notation such as 1e6 is accepted."),
    seed: int | None = typer.Option(None, "--seed", help="Base seed; generated and echoed when absent."),
    threads: int | None = typer.Option(None, "--threads", help="Worker threads for trial blocks."),
    block_size: int = typer.Option(DEFAULT_BLOCK_SIZE, "--block-size", help="Trials per independent random stream."),
    check_exact: bool = typer.Option(False, "--compare-exact", help="Compare with the exact fidelity (z-score test)."),
    exact_offset: float = typer.Option(0.0, "--exact-offset", help="Shift the exact value before comparing."),
    ledger: Path = typer.Option(DEFAULT_LEDGER, "--ledger", help="CSV ledger that receives one row per run."),
    no_ledger: bool = typer.Option(False, "--no-ledger", help="Do not append to the ledger."),
    json_output: bool = typer.Option(False, "--json", help="Print results as JSON to stdout."),
    output: Path | None = typer.Option(None, "--output", help="Also write the results to this file."),
    output_format: str = typer.Option("json", "--format", help="File format for --output: json or csv."),
    verbose: bool = typer.Option(False, "--verbose", help="Print tracebacks on errors."),
) -> None:
    try:
        fmt = parse_format(output_format)
        count = parse_trials(trials)
        if two_stage == (strategy_file is not None):
            raise UsageError("pass exactly one of --strategy FILE or --two-stage")
        base_seed = resolve_seed(seed)
        results: list[SimulationResult] = []
        payload: dict = {}

        if two_stage:
            if copies is None:
                raise UsageError("--two-stage needs --n")
            plans = [_two_stage_plan(n, n0, beta, lam) for n in parse_copies(copies)]
            if sweep is not None:
                if len(plans) != 1:
                    raise UsageError("--sweep runs at a single N")
                result_sweep = sweep_lambda(plans[0], _parse_lambdas(sweep), count, base_seed, threads=threads, block_size=block_size)
                results.extend(result_sweep.results)
                payload["sweep"] = result_sweep.to_dict()
                if not json_output:
                    render_sweep_human(result_sweep)
            else:
                for plan in plans:
                    results.append(simulate_two_stage(plan, count, base_seed, threads=threads, block_size=block_size))
        else:
            strategy = load_strategy(strategy_file)
            if isinstance(strategy, TwoStagePlan) and check_exact:
                raise UsageError("two-stage plans have no exact value to compare against")
            resolved = Prior.parse(prior) if prior else None
            if check_exact:
                comparison = compare_exact(
                    strategy, resolved, count, base_seed, guess=guess, threads=threads,
                    exact_offset=exact_offset, block_size=block_size,
                )
                results.append(comparison.simulation)
                payload["comparison"] = comparison.to_dict()
                if not json_output:
                    render_comparison_human(comparison)
            else:
                results.append(simulate(strategy, resolved, count, base_seed, guess=guess, threads=threads, block_size=block_size))

        config = RunConfig(
            command="simulate",
            copies=tuple(result.copies for result in results),
            prior=results[0].prior,
            strategy=str(strategy_file) if strategy_file else "two-stage",
            trials=count,
            seed=base_seed,
            threads=threads,
            output=output,
            output_format=fmt,
        )
        payload["results"] = [result.to_dict() for result in results]
        payload["run"] = config.to_dict()
        if json_output:
            typer.echo(dumps_json(payload), nl=False)
        else:
            render_results_human(results)

        if not no_ledger:
            append_results(results, ledger)
            typer.echo(f"Ledger updated: {ledger}", err=True)
        if output is not None:
            if fmt == "csv":
                write_csv([result.to_ledger_row() for result in results], LEDGER_FIELDS, output)
            else:
                write_json(payload, output)
            typer.echo(f"Results written: {output}", err=True)

        failed = payload.get("comparison", {}).get("passed") is False
        raise typer.Exit(code=1 if failed else 0)
    except typer.Exit:
        raise
    except Exception as exc:  # noqa: BLE001
        fail(exc, verbose)


__all__ = ["simulate_command"]
