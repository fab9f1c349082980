"""Result and parameter models for the error-probability bounds."""

from __future__ import annotations

import math
from typing import Any

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from ..combinatorics import LOG_ZERO, LogValue, log_sum_exp
from ..errors import ParameterError


class BoundResult(BaseModel):
    """Bound value with the union-region / large-noise-region split.

    ``p_upper`` is min(1, exp(log_p)) where log_p combines the three masses;
    ``log_p`` itself stays unclamped for diagnostics.
    """

    name: str
    p_upper: float = Field(..., ge=0.0, le=1.0)
    log_p: LogValue
    union_mass: LogValue = LOG_ZERO
    noise_mass: LogValue = LOG_ZERO
    pruned_mass: LogValue = LOG_ZERO
    types_visited: int = 0
    wall_time: float = 0.0
    diagnostics: dict[str, Any] = Field(default_factory=dict)

    @classmethod
    def from_masses(
        cls,
        name: str,
        *,
        union_mass: LogValue = LOG_ZERO,
        noise_mass: LogValue = LOG_ZERO,
        pruned_mass: LogValue = LOG_ZERO,
        types_visited: int = 0,
        wall_time: float = 0.0,
        diagnostics: dict[str, Any] | None = None,
    ) -> "BoundResult":
        log_p = log_sum_exp([union_mass, noise_mass, pruned_mass])
        return cls(
            name=name,
            p_upper=clamp_probability(log_p),
            log_p=log_p,
            union_mass=union_mass,
            noise_mass=noise_mass,
            pruned_mass=pruned_mass,
            types_visited=types_visited,
            wall_time=wall_time,
            diagnostics=diagnostics or {},
        )

    @classmethod
    def zero(cls, name: str, **diagnostics: Any) -> "BoundResult":
        return cls(name=name, p_upper=0.0, log_p=LOG_ZERO, diagnostics=dict(diagnostics))

    @property
    def log10_value(self) -> float:
        return self.log_p / math.log(10.0) if self.p_upper < 1.0 else 0.0


def clamp_probability(log_value: LogValue) -> float:
    if log_value >= 0.0:
        return 1.0
    return math.exp(log_value)


class RectLimits(BaseModel):
    """Caps m_j on the counts of symbols -M+1..M (the most likely symbol is uncapped)."""

    model_config = ConfigDict(frozen=True)

    m: tuple[int, ...] = Field(..., min_length=2)
    n: int = Field(..., ge=1)

    @model_validator(mode="after")
    def check_caps(self) -> "RectLimits":
        if len(self.m) % 2:
            raise ValueError("rectangle needs one cap per symbol except -M (an even count)")
        for cap in self.m:
            if not 0 <= cap <= self.n:
                raise ValueError(f"cap {cap} outside 0..{self.n}")
        return self

    @property
    def half_width(self) -> int:
        return len(self.m) // 2

    def cap(self, symbol: int) -> int:
        """Cap for symbol in -M+1..M."""

        return self.m[symbol + self.half_width - 1]

    def covers_everything(self) -> bool:
        return all(cap >= self.n for cap in self.m)

    def contains(self, ell) -> bool:
        return all(ell[index + 1] <= cap for index, cap in enumerate(self.m))

    def describe(self) -> str:
        return ";".join(str(cap) for cap in self.m)


def make_limits(caps, n: int) -> RectLimits:
    """RectLimits from a sequence or a ``;``/``,`` separated string."""

    if isinstance(caps, str):
        try:
            caps = [int(part) for part in caps.replace(",", ";").split(";") if part.strip()]
        except ValueError as exc:
            raise ParameterError(f"rectangle caps must be integers, got {caps!r}") from exc
    try:
        return RectLimits(m=tuple(caps), n=n)
    except ValidationError as exc:
        raise ParameterError(f"invalid rectangle {caps}: {exc.errors()[0]['msg']}") from exc
