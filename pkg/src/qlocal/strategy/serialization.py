from __future__ import annotations

import json
from hashlib import sha1
from pathlib import Path
from typing import Any

from qlocal.core.bloch import BlochVector
from qlocal.errors import PlanError
from qlocal.strategy.models import AdaptiveTree, FixedAxesPlan, Strategy, TwoStagePlan

STRATEGY_KINDS = ("adaptive-tree", "fixed-axes", "two-stage")


def strategy_to_dict(strategy: Strategy) -> dict[str, Any]:
    return strategy.to_dict()


def strategy_from_dict(payload: Any) -> Strategy:
    if not isinstance(payload, dict):
        raise PlanError("strategy document must be a JSON object")
    kind = payload.get("kind")
    if kind not in STRATEGY_KINDS:
        raise PlanError(f"unknown strategy kind {kind!r}; expected one of {', '.join(STRATEGY_KINDS)}")
    try:
        depth = int(payload["depth"])
        if kind == "adaptive-tree":
            nodes = payload["nodes"]
            if not isinstance(nodes, list):
                raise PlanError("'nodes' must be a list")
            mapping: dict[str, list[float]] = {}
            for node in nodes:
                prefix = str(node["prefix"])
                if prefix in mapping:
                    raise PlanError(f"duplicate node prefix {prefix!r}")
                mapping[prefix] = [float(value) for value in node["dir"]]
            return AdaptiveTree.from_nodes(depth, mapping)
        if kind == "fixed-axes":
            raw_axes = list(payload["axes"])
            dim = 2 if len(raw_axes) == 2 else 3
            axes = tuple(BlochVector.from_array(axis, dim=dim) for axis in raw_axes)
            plan = FixedAxesPlan(axes, int(payload["repetitions"]))
            if plan.total_copies != depth:
                raise PlanError(f"fixed-axes depth {depth} does not match {len(axes)} axes x {plan.repetitions}")
            return plan
        beta = payload.get("beta")
        return TwoStagePlan(
            depth,
            int(payload["n0"]),
            lam=float(payload.get("lambda", 1.0)),
            beta=None if beta is None else float(beta),
        )
    except KeyError as exc:
        raise PlanError(f"strategy document is missing field {exc.args[0]!r}") from exc
    except (TypeError, ValueError) as exc:
        if isinstance(exc, PlanError):
            raise
        raise PlanError(f"invalid strategy document: {exc}") from exc


def load_strategy(path: Path) -> Strategy:
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise PlanError(f"malformed strategy JSON in {path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return strategy_from_dict(payload)


def dump_strategy(strategy: Strategy, path: Path) -> Path:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(json.dumps(strategy_to_dict(strategy), indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
    return target


def strategy_hash(strategy: Strategy) -> str:
    canonical = json.dumps(strategy_to_dict(strategy), sort_keys=True, separators=(",", ":"))
    return sha1(canonical.encode("utf-8")).hexdigest()[:12]


__all__ = [
    "STRATEGY_KINDS",
    "strategy_to_dict",
    "strategy_from_dict",
    "load_strategy",
    "dump_strategy",
    "strategy_hash",
]
