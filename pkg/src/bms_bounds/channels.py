"""Binary-input memoryless symmetric channels with a discrete output alphabet."""

from __future__ import annotations

import math
from collections.abc import Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from .config import PROBABILITY_SUM_TOLERANCE, TIE_RELATIVE_TOLERANCE
from .errors import ParameterError

ExtendedReal = float

CHANNEL_FAMILIES = ("bsc", "bec", "bsc-bec", "quinary")


class BmsChannel(BaseModel):
    """Output distribution for input 0 over symbols -M..M.

    The input-1 row is never stored: P(y|1) is p0[-y].
    """

    model_config = ConfigDict(frozen=True)

    p0: tuple[float, ...] = Field(..., min_length=1)
    family: str = "raw"
    parameters: dict[str, float] = Field(default_factory=dict)

    @field_validator("p0")
    @classmethod
    def validate_distribution(cls, value: tuple[float, ...]) -> tuple[float, ...]:
        if len(value) % 2 != 1:
            raise ValueError("output alphabet must have odd size 2M+1")
        for entry in value:
            if not (0.0 <= entry <= 1.0) or math.isnan(entry):
                raise ValueError(f"probability {entry} outside [0, 1]")
        total = math.fsum(value)
        if abs(total - 1.0) > PROBABILITY_SUM_TOLERANCE:
            raise ValueError(f"probabilities sum to {total!r}, expected 1")
        return tuple(entry / total for entry in value)

    @property
    def half_width(self) -> int:
        return (len(self.p0) - 1) // 2

    @property
    def alphabet_size(self) -> int:
        return len(self.p0)

    @property
    def symbols(self) -> range:
        return range(-self.half_width, self.half_width + 1)

    def prob(self, symbol: int, bit: int = 0) -> float:
        """P(symbol | bit) using the symmetry P(y|1) = P(-y|0)."""

        self._check_symbol(symbol)
        index = (-symbol if bit else symbol) + self.half_width
        return self.p0[index]

    def p1(self) -> tuple[float, ...]:
        return tuple(reversed(self.p0))

    def llr_vector(self) -> np.ndarray:
        """LLR per symbol position, +inf/-inf where one likelihood vanishes."""

        p0 = np.asarray(self.p0)
        mirrored = p0[::-1]
        with np.errstate(divide="ignore", invalid="ignore"):
            values = np.log(p0) - np.log(mirrored)
        values[(p0 > 0) & (mirrored == 0)] = np.inf
        values[(p0 == 0) & (mirrored > 0)] = -np.inf
        values[(p0 == 0) & (mirrored == 0)] = 0.0
        # exact antisymmetry regardless of rounding in the subtraction
        half = self.half_width
        values[half] = 0.0
        for offset in range(1, half + 1):
            values[half + offset] = -values[half - offset]
        return values

    def unreachable_symbols(self) -> list[int]:
        """Symbols impossible under either input."""

        return [symbol for symbol in self.symbols if self.prob(symbol) == 0.0 and self.prob(-symbol) == 0.0]

    def _check_symbol(self, symbol: int) -> None:
        if not -self.half_width <= symbol <= self.half_width:
            raise ParameterError(f"symbol {symbol} outside -{self.half_width}..{self.half_width}")


def _build(p0: Sequence[float], family: str, parameters: dict[str, float]) -> BmsChannel:
    try:
        return BmsChannel(p0=tuple(float(entry) for entry in p0), family=family, parameters=parameters)
    except ValidationError as exc:
        raise ParameterError(f"invalid {family} channel {parameters}: {exc.errors()[0]['msg']}") from exc


def _require_probability(name: str, value: float, upper: float = 1.0) -> None:
    if math.isnan(value) or not 0.0 <= value <= upper:
        raise ParameterError(f"{name}={value} must lie in [0, {upper}]")


def make_bsc(epsilon: float) -> BmsChannel:
    _require_probability("epsilon", epsilon, 0.5)
    return _build((1.0 - epsilon, 0.0, epsilon), "bsc", {"epsilon": epsilon})


def make_bec(delta: float) -> BmsChannel:
    _require_probability("delta", delta)
    return _build((1.0 - delta, delta, 0.0), "bec", {"delta": delta})


def make_bsc_bec(epsilon: float, delta: float) -> BmsChannel:
    _require_probability("epsilon", epsilon, 0.5)
    _require_probability("delta", delta)
    if epsilon + delta > 1.0:
        raise ParameterError(f"epsilon + delta = {epsilon + delta} exceeds 1")
    return _build((1.0 - epsilon - delta, delta, epsilon), "bsc-bec", {"epsilon": epsilon, "delta": delta})


def make_quinary(epsilon: float, delta: float, gamma: float) -> BmsChannel:
    """Strong-correct at -2, weak-correct at -1, erasure at 0, weak-error at +1, no strong error."""

    for name, value in (("epsilon", epsilon), ("delta", delta), ("gamma", gamma)):
        _require_probability(name, value)
    if epsilon + delta + gamma > 1.0:
        raise ParameterError(f"epsilon + delta + gamma = {epsilon + delta + gamma} exceeds 1")
    return _build(
        (1.0 - epsilon - delta - gamma, gamma, delta, epsilon, 0.0),
        "quinary",
        {"epsilon": epsilon, "delta": delta, "gamma": gamma},
    )


def make_raw(p0: Sequence[float]) -> BmsChannel:
    return _build(p0, "raw", {})


def make_channel(family: str, **parameters: float) -> BmsChannel:
    """Named constructor dispatch used by the CLI and config files."""

    try:
        if family == "bsc":
            return make_bsc(parameters["epsilon"])
        if family == "bec":
            return make_bec(parameters["delta"])
        if family == "bsc-bec":
            return make_bsc_bec(parameters["epsilon"], parameters["delta"])
        if family == "quinary":
            return make_quinary(parameters["epsilon"], parameters["delta"], parameters["gamma"])
    except KeyError as exc:
        raise ParameterError(f"channel family '{family}' requires parameter {exc.args[0]!r}") from exc
    raise ParameterError(f"unknown channel family '{family}', expected one of {CHANNEL_FAMILIES}")


def llr(channel: BmsChannel, j: int) -> ExtendedReal:
    """ln(P(j|0) / P(j|1)); 0 for symbols unreachable under both inputs."""

    channel._check_symbol(j)
    return float(channel.llr_vector()[j + channel.half_width])


def error_type_mask(
    llr_values: np.ndarray,
    counts: Sequence[np.ndarray | int],
    *,
    rtol: float = TIE_RELATIVE_TOLERANCE,
) -> np.ndarray:
    """Vectorized pairwise-error predicate sum_j counts[j] * LLR_j <= 0.

    ``counts`` holds one broadcastable array per symbol position. The finite
    part is accumulated as (count[-j] - count[+j]) * LLR_{-j} over symbol
    pairs so exact ties evaluate to exactly zero; residual near-ties within
    ``rtol`` of the summed magnitudes count as errors.
    """

    size = len(llr_values)
    half = (size - 1) // 2
    arrays = [np.asarray(count) for count in counts]
    shape = np.broadcast_shapes(*(array.shape for array in arrays))
    has_pos = np.zeros(shape, dtype=bool)
    has_neg = np.zeros(shape, dtype=bool)
    signed = np.zeros(shape, dtype=np.float64)
    magnitude = np.zeros(shape, dtype=np.float64)

    for offset in range(1, half + 1):
        low, high = half - offset, half + offset
        value = float(llr_values[low])
        if math.isinf(value):
            # the pair has one impossible-under-1 and one impossible-under-0 side
            pos_side, neg_side = (low, high) if value > 0 else (high, low)
            has_pos |= arrays[pos_side] > 0
            has_neg |= arrays[neg_side] > 0
            continue
        if value == 0.0:
            continue
        diff = (arrays[low] - arrays[high]).astype(np.float64)
        signed = signed + diff * value
        magnitude = magnitude + (arrays[low] + arrays[high]).astype(np.float64) * abs(value)

    finite_error = signed <= rtol * magnitude
    return np.where(has_pos, False, np.where(has_neg, True, finite_error))


def is_error_type(channel: BmsChannel, mu: Sequence[int]) -> bool:
    """True when a weight-w codeword is at least as likely as the all-zero word."""

    if len(mu) != channel.alphabet_size:
        raise ParameterError(f"type has {len(mu)} entries, channel alphabet has {channel.alphabet_size}")
    mask = error_type_mask(channel.llr_vector(), [int(count) for count in mu])
    return bool(mask)


def channel_capacity(channel: BmsChannel) -> float:
    """Mutual information in bits at uniform input."""

    p0 = np.asarray(channel.p0)
    p1 = p0[::-1]
    mixture = 0.5 * (p0 + p1)
    with np.errstate(divide="ignore", invalid="ignore"):
        term = np.where(p0 > 0, p0 * np.log2(p0 / mixture), 0.0)
    return float(np.sum(term))
