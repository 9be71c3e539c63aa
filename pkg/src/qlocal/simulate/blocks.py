from __future__ import annotations

import math
from typing import Callable

import numpy as np

from qlocal.core.bloch import make_rng, spawn_seeds
from qlocal.simulate.models import SimulationConfig
from qlocal.utils.runtime import map_ordered

BlockFn = Callable[[int, np.random.Generator], np.ndarray]


def run_blocks(block: BlockFn, config: SimulationConfig) -> tuple[float, float]:
    """Run ``block(size, rng)`` over fixed trial blocks and reduce the per-trial fidelities.

    Each block owns one spawned stream and results are concatenated in block
    order, so the estimate is the same for any worker count.
    """
    sizes = config.block_sizes
    children = spawn_seeds(config.seed, len(sizes))
    parts = map_ordered(lambda i: block(sizes[i], make_rng(children[i])), range(len(sizes)), threads=config.threads)
    values = np.concatenate(parts)
    mean = float(np.mean(values))
    stderr = float(np.std(values, ddof=1)) / math.sqrt(values.size) if values.size > 1 else 0.0
    return min(1.0, max(0.0, mean)), stderr


def overlap_fidelities(states: np.ndarray, guesses: np.ndarray) -> np.ndarray:
    return 0.5 * (1.0 + np.einsum("ij,ij->i", states, guesses))


__all__ = ["BlockFn", "run_blocks", "overlap_fidelities"]
