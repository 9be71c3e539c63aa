from __future__ import annotations

import typer

from qlocal.evaluate.main import bounds_command, eval_command, series_command
from qlocal.fit.main import fit_command
from qlocal.optimize.main import optimize_command
from qlocal.simulate.main import simulate_command

app = typer.Typer(
    help="qlocal: exact evaluation, optimization and simulation of local qubit measurement strategies.",
    no_args_is_help=True,
)


@app.callback()
def main() -> None:
    """Root CLI group for qlocal subcommands."""


app.command(name="bounds")(bounds_command)
app.command(name="eval")(eval_command)
app.command(name="series")(series_command)
app.command(name="optimize")(optimize_command)
app.command(name="simulate")(simulate_command)
app.command(name="fit")(fit_command)

__all__ = ["app"]
