from __future__ import annotations

import os
import platform
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Iterable, Sequence, TypeVar

from qlocal import __version__

_T = TypeVar("_T")
_R = TypeVar("_R")


def _get_psutil() -> Any | None:
    try:
        import psutil
    except Exception:  # pragma: no cover
        return None
    return psutil


def default_thread_count() -> int:
    psutil_mod = _get_psutil()
    if psutil_mod is not None:
        try:
            logical = psutil_mod.cpu_count(logical=True)
        except Exception:  # noqa: BLE001
            logical = None
        if logical:
            return int(logical)
    return os.cpu_count() or 1


def resolve_threads(threads: int | None) -> int:
    if threads is None:
        return default_thread_count()
    if threads < 1:
        raise ValueError("threads must be >= 1")
    return int(threads)


def map_ordered(fn: Callable[[_T], _R], items: Sequence[_T] | Iterable[_T], threads: int | None = None) -> list[_R]:
    """Apply ``fn`` to every item and return results in input order.

    Work units are fixed by the caller, so the reduction that follows is
    independent of how many workers ran them.
    """
    work = list(items)
    workers = min(resolve_threads(threads), max(1, len(work)))
    if workers == 1:
        return [fn(item) for item in work]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, work))


def runtime_metadata() -> dict[str, str]:
    return {
        "qlocal_version": __version__,
        "python_version": platform.python_version(),
    }


__all__ = ["default_thread_count", "resolve_threads", "map_ordered", "runtime_metadata"]
