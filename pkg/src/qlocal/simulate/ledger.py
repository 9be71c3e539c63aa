from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from qlocal.core.bloch import Prior
from qlocal.errors import PlanError
from qlocal.simulate.models import SimulationResult
from qlocal.utils.io import DEFAULT_OUTPUT_DIR, append_csv, read_csv

LEDGER_FIELDS = ("strategy_hash", "scheme", "prior", "N", "trials", "seed", "mean", "stderr")
DEFAULT_LEDGER = DEFAULT_OUTPUT_DIR / "ledger.csv"


@dataclass(frozen=True, slots=True)
class LedgerRow:
    strategy_hash: str
    scheme: str
    prior: Prior
    copies: int
    trials: int
    seed: int
    mean: float
    stderr: float


def append_results(results: Iterable[SimulationResult], path: Path = DEFAULT_LEDGER) -> Path:
    return append_csv((result.to_ledger_row() for result in results), LEDGER_FIELDS, path)


def read_ledger(path: Path) -> list[LedgerRow]:
    rows = []
    for number, raw in enumerate(read_csv(path), start=2):
        try:
            rows.append(
                LedgerRow(
                    strategy_hash=raw["strategy_hash"],
                    scheme=raw["scheme"],
                    prior=Prior.parse(raw["prior"]),
                    copies=int(raw["N"]),
                    trials=int(raw["trials"]),
                    seed=int(raw["seed"]),
                    mean=float(raw["mean"]),
                    stderr=float(raw["stderr"]),
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise PlanError(f"{path}: malformed ledger row on line {number}: {exc}") from exc
    return rows


__all__ = ["LEDGER_FIELDS", "DEFAULT_LEDGER", "LedgerRow", "append_results", "read_ledger"]
