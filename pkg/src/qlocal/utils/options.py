from __future__ import annotations

import math
import traceback
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, NoReturn

import typer

from qlocal.core.bloch import Prior, generate_seed
from qlocal.errors import CapExceededError, UsageError
from qlocal.utils.runtime import runtime_metadata

OUTPUT_FORMATS = ("json", "csv")

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_USAGE = 2
EXIT_CAP = 3
EXIT_NOT_CONVERGED = 4


def parse_copies(raw: str) -> list[int]:
    """Parse ``a..b``, ``a..b:step`` or a comma list into sorted unique copy counts."""
    text = (raw or "").strip()
    if not text:
        raise UsageError("empty N range")
    values: set[int] = set()
    try:
        for part in (item.strip() for item in text.split(",")):
            if not part:
                continue
            if ".." in part:
                bounds, _, step_text = part.partition(":")
                start_text, _, stop_text = bounds.partition("..")
                start, stop = int(start_text), int(stop_text)
                step = int(step_text) if step_text else 1
                if step < 1 or stop < start:
                    raise UsageError(f"bad N range {part!r}")
                values.update(range(start, stop + 1, step))
            else:
                values.add(int(part))
    except ValueError as exc:
        if isinstance(exc, UsageError):
            raise
        raise UsageError(f"bad N range {raw!r}; use a..b, a..b:step or a comma list") from exc
    if not values or min(values) < 1:
        raise UsageError("N values must be >= 1")
    return sorted(values)


def parse_trials(raw: str | int) -> int:
    """Trial counts accept scientific notation, e.g. ``1e6``."""
    try:
        value = float(raw)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"bad trial count {raw!r}") from exc
    if not math.isfinite(value) or value < 1 or value != int(value):
        raise UsageError(f"trial count must be a positive integer, got {raw!r}")
    return int(value)


def parse_format(raw: str) -> str:
    normalized = (raw or "json").strip().lower()
    if normalized not in OUTPUT_FORMATS:
        raise UsageError(f"unknown output format {raw!r}; expected json or csv")
    return normalized


def resolve_seed(seed: int | None) -> int:
    """Return ``seed`` or a fresh one, echoing generated seeds on stderr."""
    if seed is not None:
        if seed < 0:
            raise UsageError("seed must be >= 0")
        return seed
    generated = generate_seed()
    typer.echo(f"seed: {generated} (generated)", err=True)
    return generated


@dataclass(frozen=True, slots=True)
class RunConfig:
    """Full flag set of one command invocation, stored next to its outputs."""

    command: str
    copies: tuple[int, ...] = field(default_factory=tuple)
    prior: Prior | None = None
    strategy: str | None = None
    trials: int | None = None
    seed: int | None = None
    threads: int | None = None
    output: Path | None = None
    output_format: str = "json"

    def __post_init__(self) -> None:
        if self.output_format not in OUTPUT_FORMATS:
            raise UsageError(f"unknown output format {self.output_format!r}")
        if self.trials is not None and self.trials < 1:
            raise UsageError("trials must be >= 1")
        if self.threads is not None and self.threads < 1:
            raise UsageError("threads must be >= 1")

    def to_dict(self) -> dict[str, Any]:
        return {
            "command": self.command,
            "N": list(self.copies),
            "prior": None if self.prior is None else self.prior.value,
            "strategy": self.strategy,
            "trials": self.trials,
            "seed": self.seed,
            "threads": self.threads,
            "output": None if self.output is None else str(self.output),
            "format": self.output_format,
            "runtime": runtime_metadata(),
        }


def fail(exc: BaseException, verbose: bool = False) -> NoReturn:
    """Report ``exc`` on stderr and exit with its mapped code."""
    if isinstance(exc, CapExceededError):
        typer.echo(str(exc), err=True)
        raise typer.Exit(code=EXIT_CAP)
    if isinstance(exc, (ValueError, KeyError, OSError)):
        typer.echo(str(exc), err=True)
        if verbose:
            typer.echo(traceback.format_exc(), err=True)
        raise typer.Exit(code=EXIT_USAGE)
    typer.echo(f"qlocal failed: {type(exc).__name__}: {exc}", err=True)
    if verbose:
        typer.echo(traceback.format_exc(), err=True)
    raise typer.Exit(code=EXIT_UNEXPECTED)


__all__ = [
    "OUTPUT_FORMATS",
    "EXIT_OK",
    "EXIT_UNEXPECTED",
    "EXIT_USAGE",
    "EXIT_CAP",
    "EXIT_NOT_CONVERGED",
    "parse_copies",
    "parse_trials",
    "parse_format",
    "resolve_seed",
    "RunConfig",
    "fail",
]
