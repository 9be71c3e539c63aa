from __future__ import annotations

import math
import threading

import numpy as np
from scipy.special import gammaln

from qlocal.core.bloch import Prior

_LOG_2PI = math.log(2.0 * math.pi)
_LOG_PI = math.log(math.pi)


def _check_exponents(*exponents: int) -> None:
    for value in exponents:
        if int(value) != value or value < 0:
            raise ValueError(f"Moment exponents must be non-negative integers, got {exponents}")


def sphere_moment(p: int, q: int, r: int) -> float:
    """Average of n_x^p n_y^q n_z^r over the uniform unit sphere.

    Zero unless all exponents are even; otherwise
    (p-1)!! (q-1)!! (r-1)!! / (p+q+r+1)!!, evaluated through log-gamma so
    large degrees do not overflow.
    """
    _check_exponents(p, q, r)
    if p % 2 or q % 2 or r % 2:
        return 0.0
    a, b, c = p // 2, q // 2, r // 2
    log_value = (
        gammaln(a + 0.5)
        + gammaln(b + 0.5)
        + gammaln(c + 0.5)
        - gammaln(a + b + c + 1.5)
        - _LOG_2PI
    )
    return float(np.exp(log_value))


def circle_moment(p: int, q: int) -> float:
    """Average of cos^p(phi) sin^q(phi) over the unit circle."""
    _check_exponents(p, q)
    if p % 2 or q % 2:
        return 0.0
    a, b = p // 2, q // 2
    log_value = gammaln(a + 0.5) + gammaln(b + 0.5) - gammaln(a + b + 1.0) - _LOG_PI
    return float(np.exp(log_value))


def _build_cube(prior: Prior, size: int) -> np.ndarray:
    p, q, r = np.indices((size, size, size))
    even = (p % 2 == 0) & (q % 2 == 0) & (r % 2 == 0)
    a, b, c = p // 2, q // 2, r // 2
    if prior is Prior.SPHERE_3D:
        log_value = gammaln(a + 0.5) + gammaln(b + 0.5) + gammaln(c + 0.5) - gammaln(a + b + c + 1.5) - _LOG_2PI
        cube = np.where(even, np.exp(log_value), 0.0)
    else:
        log_value = gammaln(a + 0.5) + gammaln(b + 0.5) - gammaln(a + b + 1.0) - _LOG_PI
        cube = np.where(even & (r == 0), np.exp(log_value), 0.0)
    return cube


class MomentTable:
    """Process-wide cache of moment cubes M[p, q, r], grown on demand.

    Cubes handed out are read-only views; growth happens under a lock and
    replaces the cached array, so readers never observe a partial table.
    """

    _lock = threading.Lock()
    _cubes: dict[Prior, np.ndarray] = {}

    @classmethod
    def cube(cls, prior: Prior, size: int) -> np.ndarray:
        if size < 1:
            raise ValueError("size must be >= 1")
        cached = cls._cubes.get(prior)
        if cached is None or cached.shape[0] < size:
            with cls._lock:
                cached = cls._cubes.get(prior)
                if cached is None or cached.shape[0] < size:
                    grown = _build_cube(prior, max(size, 2 * (cached.shape[0] if cached is not None else 0), 8))
                    grown.setflags(write=False)
                    cls._cubes[prior] = grown
                    cached = grown
        return cached[:size, :size, :size]

    @classmethod
    def clear(cls) -> None:
        with cls._lock:
            cls._cubes.clear()


__all__ = ["sphere_moment", "circle_moment", "MomentTable"]
