"""Exception hierarchy shared by every module."""

from __future__ import annotations

from pathlib import Path


class BoundsError(Exception):
    """Base class for all toolkit errors."""


class ParameterError(BoundsError, ValueError):
    """Invalid channel, spectrum or bound parameter."""


class SpectrumLoadError(ParameterError):
    """Malformed spectrum file."""

    def __init__(self, path: str | Path, line_number: int | None, message: str) -> None:
        self.path = Path(path)
        self.line_number = line_number
        location = f"{self.path}:{line_number}" if line_number is not None else str(self.path)
        super().__init__(f"{location}: {message}")


class RankError(ParameterError):
    """Generator matrix rows are linearly dependent over GF(2)."""


class BudgetExceededError(BoundsError, RuntimeError):
    """An exhaustive computation would exceed its configured budget."""

    def __init__(self, what: str, required: int, allowed: int) -> None:
        self.required = required
        self.allowed = allowed
        super().__init__(f"{what} requires {required} evaluations, budget is {allowed}")
