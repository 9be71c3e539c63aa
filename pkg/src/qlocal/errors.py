from __future__ import annotations


class QlocalError(Exception):
    """Base class for every error raised by qlocal."""


class UsageError(QlocalError, ValueError):
    pass


class ZeroVectorError(QlocalError, ValueError):
    pass


class NonUnitVectorError(QlocalError, ValueError):
    pass


class DimensionMismatchError(QlocalError, ValueError):
    pass


class PlanError(QlocalError, ValueError):
    pass


class ParityError(PlanError):
    pass


class CapExceededError(QlocalError, ValueError):
    def __init__(self, message: str, *, limit: int | None = None, requested: int | None = None) -> None:
        super().__init__(message)
        self.limit = limit
        self.requested = requested


class SingularDesignError(QlocalError, ValueError):
    pass


class MissingSeriesError(QlocalError, KeyError):
    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "missing series"


__all__ = [
    "QlocalError",
    "UsageError",
    "ZeroVectorError",
    "NonUnitVectorError",
    "DimensionMismatchError",
    "PlanError",
    "ParityError",
    "CapExceededError",
    "SingularDesignError",
    "MissingSeriesError",
]
