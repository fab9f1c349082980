"""Ensemble spectra and exhaustive enumeration from a generator matrix."""

from __future__ import annotations

import math

import numpy as np

from ..combinatorics import log_factorials
from ..config import BRUTE_FORCE_MAX_DIMENSION
from ..errors import BudgetExceededError, ParameterError, RankError
from .models import Codebook, WeightSpectrum, message_bits

ENUMERATION_BATCH = 1 << 14


def _log_two_power_minus_one(exponent: int) -> float:
    """ln(2^e - 1) without overflow."""

    return exponent * math.log(2.0) + math.log1p(-(2.0**-exponent))


def binomial_spectrum(n: int, k: int) -> WeightSpectrum:
    """Average spectrum of random linear codes: S_w = (2^k - 1) C(n, w) / (2^n - 1)."""

    if n < 1 or k < 1 or k > n:
        raise ParameterError(f"binomial spectrum needs 0 < k <= n, got n={n}, k={k}")
    weights = np.arange(n + 1)
    log_s = (
        _log_two_power_minus_one(k)
        - _log_two_power_minus_one(n)
        + log_factorials().log_binomial(np.full(n + 1, n), weights)
    )
    log_s[0] = 0.0
    return WeightSpectrum(n=n, log_s=tuple(float(value) for value in log_s), k=k, label=f"binomial({n},{k})")


def log_binomial_ensemble(n: int, k: float) -> np.ndarray:
    """ln of the ensemble-average count for w = 0..n, k possibly fractional."""

    weights = np.arange(n + 1)
    log_numerator = k * math.log(2.0) + math.log1p(-(2.0**-k)) if k > 0 else float("-inf")
    return log_numerator - _log_two_power_minus_one(n) + log_factorials().log_binomial(np.full(n + 1, n), weights)


def gf2_rank(matrix: np.ndarray) -> int:
    """Rank over GF(2) by Gaussian elimination."""

    work = np.array(matrix, dtype=np.uint8) % 2
    rows, cols = work.shape
    rank = 0
    for col in range(cols):
        pivots = np.nonzero(work[rank:, col])[0]
        if pivots.size == 0:
            continue
        pivot = rank + int(pivots[0])
        if pivot != rank:
            work[[rank, pivot]] = work[[pivot, rank]]
        others = np.nonzero(work[:, col])[0]
        others = others[others != rank]
        work[others] ^= work[rank]
        rank += 1
        if rank == rows:
            break
    return rank


def validate_generator(generator: np.ndarray, *, max_dimension: int = BRUTE_FORCE_MAX_DIMENSION) -> np.ndarray:
    """Check shape, entries, enumeration budget and full row rank."""

    matrix = np.asarray(generator)
    if matrix.ndim != 2 or matrix.shape[0] == 0 or matrix.shape[1] == 0:
        raise ParameterError("generator must be a non-empty k x n matrix")
    if np.any((matrix != 0) & (matrix != 1)):
        raise ParameterError("generator entries must be 0 or 1")
    matrix = matrix.astype(np.uint8)
    k = matrix.shape[0]
    if k > max_dimension:
        raise BudgetExceededError("codeword enumeration", 2**k, 2**max_dimension)
    rank = gf2_rank(matrix)
    if rank < k:
        raise RankError(f"generator rows are linearly dependent over GF(2): rank {rank} < {k}")
    return matrix


def brute_force_spectrum(
    generator: np.ndarray,
    *,
    max_dimension: int = BRUTE_FORCE_MAX_DIMENSION,
    label: str = "brute-force",
) -> tuple[WeightSpectrum, Codebook]:
    """Exact spectrum by enumerating every message in batches."""

    matrix = validate_generator(generator, max_dimension=max_dimension)
    k, n = matrix.shape
    histogram = np.zeros(n + 1, dtype=np.int64)
    generator_int = matrix.astype(np.int64)
    for start in range(0, 2**k, ENUMERATION_BATCH):
        stop = min(start + ENUMERATION_BATCH, 2**k)
        words = message_bits(start, stop, k).astype(np.int64) @ generator_int % 2
        histogram += np.bincount(words.sum(axis=1), minlength=n + 1)

    spectrum = WeightSpectrum.from_counts([int(count) for count in histogram], k=k, label=label)
    return spectrum, Codebook.from_generator(matrix)


def spectrum_from_codebook(codebook: Codebook, *, label: str = "codebook") -> WeightSpectrum:
    return WeightSpectrum.from_counts(codebook.weight_histogram(), k=codebook.k, label=label)
