"""Weight spectrum and codebook models."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..combinatorics import LOG_ZERO, LogValue


class WeightSpectrum(BaseModel):
    """S_w for w = 0..n, held as ln S_w with an optional exact integer copy."""

    model_config = ConfigDict(frozen=True)

    n: int = Field(..., ge=1)
    log_s: tuple[LogValue, ...]
    exact_s: tuple[int, ...] | None = None
    k: int | None = Field(default=None, ge=0)
    label: str = "spectrum"

    @model_validator(mode="after")
    def check_consistency(self) -> "WeightSpectrum":
        if len(self.log_s) != self.n + 1:
            raise ValueError(f"log_s has {len(self.log_s)} entries, expected n+1 = {self.n + 1}")
        if any(math.isnan(value) for value in self.log_s):
            raise ValueError("log_s contains NaN")
        if abs(self.log_s[0]) > 1e-12:
            raise ValueError("S_0 must equal 1")
        if self.exact_s is not None:
            if len(self.exact_s) != self.n + 1:
                raise ValueError("exact_s length does not match n")
            if self.exact_s[0] != 1:
                raise ValueError("S_0 must equal 1")
            if any(count < 0 for count in self.exact_s):
                raise ValueError("spectrum counts must be non-negative")
            for count, log_count in zip(self.exact_s, self.log_s):
                expected = math.log(count) if count > 0 else LOG_ZERO
                if expected != log_count and abs(expected - log_count) > 1e-12 * max(1.0, abs(expected)):
                    raise ValueError("log_s does not match exact_s")
            if self.k is not None and sum(self.exact_s) != 2**self.k:
                raise ValueError(f"spectrum sums to {sum(self.exact_s)}, expected 2^{self.k}")
        return self

    @classmethod
    def from_counts(cls, counts: list[int], *, k: int | None = None, label: str = "spectrum") -> "WeightSpectrum":
        log_s = tuple(math.log(count) if count > 0 else LOG_ZERO for count in counts)
        return cls(n=len(counts) - 1, log_s=log_s, exact_s=tuple(int(count) for count in counts), k=k, label=label)

    @property
    def d_min(self) -> int | None:
        """Smallest w >= 1 with S_w > 0, always derived from the counts."""

        for weight in range(1, self.n + 1):
            if self.log_s[weight] > LOG_ZERO:
                return weight
        return None

    @property
    def rate(self) -> float | None:
        return None if self.k is None else self.k / self.n

    @property
    def support(self) -> list[int]:
        return [weight for weight in range(1, self.n + 1) if self.log_s[weight] > LOG_ZERO]

    def log_array(self) -> np.ndarray:
        return np.asarray(self.log_s, dtype=np.float64)

    def value(self, weight: int) -> float:
        if self.exact_s is not None:
            return float(self.exact_s[weight])
        return math.exp(self.log_s[weight])


def message_bits(start: int, stop: int, k: int) -> np.ndarray:
    """Bit expansion (LSB first) of message indices start..stop-1."""

    indices = np.arange(start, stop, dtype=np.int64)
    shifts = np.arange(k, dtype=np.int64)
    return ((indices[:, None] >> shifts[None, :]) & 1).astype(np.uint8)


@dataclass(frozen=True, eq=False)
class Codebook:
    """All codewords of a linear code, the all-zero word included.

    Built either from an explicit 2^k x n word matrix or from a generator,
    in which case the words are encoded on first access.
    """

    n: int
    generator: np.ndarray | None = None
    explicit_words: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        if self.generator is None and self.explicit_words is None:
            raise ValueError("codebook needs a generator or an explicit word list")
        if self.explicit_words is not None:
            words = np.asarray(self.explicit_words, dtype=np.uint8)
            if words.ndim != 2 or words.shape[0] == 0 or words.shape[1] != self.n:
                raise ValueError(f"word matrix must be non-empty with {self.n} columns")
            object.__setattr__(self, "explicit_words", words)

    @classmethod
    def from_words(cls, words) -> "Codebook":
        matrix = np.asarray(words, dtype=np.uint8)
        return cls(n=int(matrix.shape[1]), explicit_words=matrix)

    @classmethod
    def from_generator(cls, generator: np.ndarray) -> "Codebook":
        matrix = np.asarray(generator, dtype=np.uint8)
        return cls(n=int(matrix.shape[1]), generator=matrix)

    @cached_property
    def words(self) -> np.ndarray:
        if self.explicit_words is not None:
            return self.explicit_words
        assert self.generator is not None
        k = self.generator.shape[0]
        messages = message_bits(0, 2**k, k).astype(np.int64)
        return (messages @ self.generator.astype(np.int64) % 2).astype(np.uint8)

    @property
    def size(self) -> int:
        return int(self.words.shape[0])

    @property
    def k(self) -> int:
        if self.generator is not None:
            return int(self.generator.shape[0])
        return int(round(math.log2(self.size)))

    @cached_property
    def nonzero_words(self) -> np.ndarray:
        return self.words[self.words.any(axis=1)]

    def is_linear(self) -> bool:
        """Closure under XOR, checked via membership of every pairwise sum."""

        if self.size & (self.size - 1):
            return False
        keys = {word.tobytes() for word in self.words}
        if np.zeros(self.n, dtype=np.uint8).tobytes() not in keys:
            return False
        return all((first ^ second).tobytes() in keys for first in self.words for second in self.words)

    def weight_histogram(self) -> list[int]:
        weights = self.words.sum(axis=1).astype(np.int64)
        return np.bincount(weights, minlength=self.n + 1).tolist()
