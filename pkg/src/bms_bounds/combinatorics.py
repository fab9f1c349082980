"""Log-domain combinatorics and iterators over non-normalized type classes."""

from __future__ import annotations

import math
import threading
from collections.abc import Iterable, Iterator, Sequence
from typing import TYPE_CHECKING

import numpy as np
from scipy.special import gammaln, xlogy

if TYPE_CHECKING:
    from .channels import BmsChannel

LogValue = float

LOG_ZERO: LogValue = float("-inf")
LOG_ONE: LogValue = 0.0


class TypeVector(tuple):
    """Symbol occurrence counts, position ``i`` holding symbol ``i - M``."""

    __slots__ = ()

    def __new__(cls, counts: Iterable[int]) -> "TypeVector":
        values = tuple(int(count) for count in counts)
        if any(count < 0 for count in values):
            raise ValueError(f"type counts must be non-negative: {values}")
        return super().__new__(cls, values)

    @property
    def total(self) -> int:
        return sum(self)

    @property
    def half_width(self) -> int:
        return (len(self) - 1) // 2

    def at(self, symbol: int) -> int:
        """Count of output symbol ``symbol`` in ``-M..M``."""

        return self[symbol + self.half_width]


class LogFactorialTable:
    """Growable table of ln(k!) shared by every log-domain coefficient."""

    def __init__(self, size: int = 256) -> None:
        self._lock = threading.Lock()
        self._values = gammaln(np.arange(max(size, 2), dtype=np.float64) + 1.0)

    @property
    def values(self) -> np.ndarray:
        return self._values

    def ensure(self, n: int) -> np.ndarray:
        """Return a table covering 0..n, growing it once when needed."""

        values = self._values
        if n < len(values):
            return values
        with self._lock:
            if n >= len(self._values):
                size = max(n + 1, 2 * len(self._values))
                self._values = gammaln(np.arange(size, dtype=np.float64) + 1.0)
            return self._values

    def log_binomial(self, n, k):
        """Vectorized ln C(n, k); -inf outside 0 <= k <= n."""

        n_arr = np.asarray(n, dtype=np.int64)
        k_arr = np.asarray(k, dtype=np.int64)
        top = int(n_arr.max()) if n_arr.size else 0
        table = self.ensure(max(top, 0))
        valid = (k_arr >= 0) & (k_arr <= n_arr) & (n_arr >= 0)
        n_safe = np.where(valid, n_arr, 0)
        k_safe = np.where(valid, k_arr, 0)
        result = table[n_safe] - table[k_safe] - table[n_safe - k_safe]
        return np.where(valid, result, LOG_ZERO)

    def log_multinomial(self, counts: Sequence[int]) -> LogValue:
        table = self.ensure(sum(counts))
        return float(table[sum(counts)] - sum(table[count] for count in counts))


_DEFAULT_TABLE = LogFactorialTable()


def log_factorials() -> LogFactorialTable:
    """Process-wide ln-factorial table."""

    return _DEFAULT_TABLE


def enumerate_types(n: int, alphabet_size: int) -> Iterator[TypeVector]:
    """Yield every composition of ``n`` into ``alphabet_size`` parts in colex order."""

    if n < 0 or alphabet_size < 1:
        return
    for counts in _compositions(n, alphabet_size):
        yield TypeVector(counts)


def _compositions(n: int, parts: int) -> Iterator[tuple[int, ...]]:
    if parts == 1:
        yield (n,)
        return
    for last in range(n + 1):
        for head in _compositions(n - last, parts - 1):
            yield head + (last,)


def enumerate_subtypes(w: int, ell: Sequence[int]) -> Iterator[TypeVector]:
    """Yield every type of size ``w`` bounded componentwise by ``ell`` in colex order."""

    caps = tuple(int(cap) for cap in ell)
    if w < 0 or w > sum(caps):
        return
    for counts in _bounded_compositions(w, caps):
        yield TypeVector(counts)


def _bounded_compositions(total: int, caps: tuple[int, ...]) -> Iterator[tuple[int, ...]]:
    if len(caps) == 1:
        if total <= caps[0]:
            yield (total,)
        return
    head_capacity = sum(caps[:-1])
    for last in range(max(0, total - head_capacity), min(caps[-1], total) + 1):
        for head in _bounded_compositions(total - last, caps[:-1]):
            yield head + (last,)


def count_types(n: int, alphabet_size: int) -> int:
    return math.comb(n + alphabet_size - 1, alphabet_size - 1)


def log_multinomial(counts: Sequence[int]) -> LogValue:
    """ln(total! / prod(counts!))."""

    return _DEFAULT_TABLE.log_multinomial(counts)


def log_sum_exp(values: Iterable[LogValue]) -> LogValue:
    """ln(sum(exp(v))) with max-shift and exactly rounded linear accumulation.

    ``math.fsum`` makes the result independent of element order, so any
    partitioning of the stream into chunks reduces to the same float.
    """

    items = [float(value) for value in values]
    if not items:
        return LOG_ZERO
    maximum = max(items)
    if math.isinf(maximum):
        return maximum
    total = math.fsum(math.exp(value - maximum) for value in items)
    return maximum + math.log(total)


def log_sum_exp_array(values: np.ndarray) -> LogValue:
    """Vectorized ln(sum(exp(v))) for a single array; -inf when empty or all -inf."""

    if values.size == 0:
        return LOG_ZERO
    maximum = float(np.max(values))
    if math.isinf(maximum):
        return maximum
    return maximum + math.log(float(np.sum(np.exp(values - maximum))))


def log1m_exp(value: LogValue) -> LogValue:
    """ln(1 - exp(value)) for value <= 0."""

    if value >= 0.0:
        return LOG_ZERO
    if value > -math.log(2.0):
        return math.log(-math.expm1(value))
    return math.log1p(-math.exp(value))


def exact_binomial(n: int, k: int) -> int:
    """Exact C(n, k); zero when k is out of range."""

    if k < 0 or n < 0 or k > n:
        return 0
    return math.comb(n, k)


def exact_multinomial(counts: Sequence[int]) -> int:
    result = 1
    running = 0
    for count in counts:
        running += count
        result *= math.comb(running, count)
    return result


def log_type_probability(channel: "BmsChannel", ell: Sequence[int]) -> LogValue:
    """sum_j ell_j * ln p0[j] under the 0^0 = 1 convention."""

    counts = np.asarray(ell, dtype=np.float64)
    if counts.shape != (channel.alphabet_size,):
        raise ValueError(
            f"type has {counts.shape[0]} entries, channel alphabet has {channel.alphabet_size}"
        )
    return float(np.sum(xlogy(counts, np.asarray(channel.p0))))
