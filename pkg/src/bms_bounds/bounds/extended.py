"""Extended bound over all output types, and its erasure/hybrid/quinary forms."""

from __future__ import annotations

import math
import time

import numpy as np
from scipy.special import xlogy

from ..channels import BmsChannel, make_bec, make_bsc_bec, make_quinary
from ..combinatorics import LOG_ZERO, LogValue, log_factorials, log_sum_exp, log_sum_exp_array
from ..config import EngineConfig
from ..errors import ParameterError
from ..spectrum.models import WeightSpectrum
from .engine import run_engine
from .models import BoundResult


def _check_spectrum(channel: BmsChannel, spectrum: WeightSpectrum) -> None:
    if not isinstance(spectrum, WeightSpectrum):
        raise ParameterError(f"expected a WeightSpectrum, got {type(spectrum).__name__}")
    if channel.alphabet_size < 1:
        raise ParameterError("channel has an empty output alphabet")


def extended_bound(
    channel: BmsChannel,
    spectrum: WeightSpectrum,
    *,
    pruning_target: float | None = None,
    workers: int | None = None,
    config: EngineConfig | None = None,
    name: str = "extended",
) -> BoundResult:
    """Sum over every output type of min(union term, type-class probability).

    ``pruning_target`` enables skipping types whose probability lies more than
    the configured log-margin below ln(target); their mass is added back.
    """

    _check_spectrum(channel, spectrum)
    config = config or EngineConfig()
    totals = run_engine(channel, spectrum, pruning_target=pruning_target, workers=workers, config=config)
    diagnostics = {"types_pruned": totals.types_pruned, "d_min": spectrum.d_min}
    if pruning_target is not None:
        diagnostics["pruning_threshold"] = math.log(pruning_target) - config.pruning_log_margin
    return BoundResult.from_masses(
        name,
        union_mass=totals.union_mass,
        noise_mass=totals.noise_mass,
        pruned_mass=totals.pruned_mass,
        types_visited=totals.types_visited,
        wall_time=totals.wall_time,
        diagnostics=diagnostics,
    )


def bec_bound(spectrum: WeightSpectrum, delta: float) -> BoundResult:
    """Single sum over the number of erasures."""

    make_bec(delta)
    if delta == 0.0:
        return BoundResult.zero("bec")

    started = time.perf_counter()
    n = spectrum.n
    table = log_factorials()
    log_s = spectrum.log_array()
    erasures = np.arange(n + 1)
    log_prob = xlogy(erasures, delta) + xlogy(n - erasures, 1.0 - delta)
    log_binomial = table.log_binomial(np.full(n + 1, n), erasures)

    union_terms: list[LogValue] = []
    noise_terms: list[LogValue] = []
    support = np.asarray(spectrum.support, dtype=np.int64)
    for count in range(n + 1):
        if support.size:
            values = log_s[support] + table.log_binomial(n - support, count - support)
            log_union = log_sum_exp_array(values)
        else:
            log_union = LOG_ZERO
        if log_union < log_binomial[count]:
            union_terms.append(log_prob[count] + log_union)
        else:
            noise_terms.append(log_prob[count] + log_binomial[count])

    return BoundResult.from_masses(
        "bec",
        union_mass=log_sum_exp(union_terms),
        noise_mass=log_sum_exp(noise_terms),
        types_visited=n + 1,
        wall_time=time.perf_counter() - started,
    )


def _log_trinomial(total, first, second) -> np.ndarray:
    """ln(total! / (first! second! (total - first - second)!)), -inf when any part is negative."""

    table = log_factorials()
    total = np.asarray(total, dtype=np.int64)
    first = np.asarray(first, dtype=np.int64)
    second = np.asarray(second, dtype=np.int64)
    rest = total - first - second
    valid = (first >= 0) & (second >= 0) & (rest >= 0)
    values = table.ensure(max(int(np.max(total)), 0))

    def pick(array: np.ndarray) -> np.ndarray:
        return values[np.where(valid, array, 0)]

    result = pick(total) - pick(first) - pick(second) - pick(rest)
    return np.where(valid, result, LOG_ZERO)


def bsc_bec_bound(spectrum: WeightSpectrum, epsilon: float, delta: float) -> BoundResult:
    """Double sum over flips and erasures for the hybrid channel."""

    make_bsc_bec(epsilon, delta)
    if epsilon == 0.0 and delta == 0.0:
        return BoundResult.zero("bsc-bec")

    started = time.perf_counter()
    n = spectrum.n
    log_s = spectrum.log_array()
    support = spectrum.support

    union_terms: list[LogValue] = []
    noise_terms: list[LogValue] = []
    visited = 0
    for flips in range(n + 1):
        for erasures in range(n - flips + 1):
            log_prob = float(
                xlogy(flips, epsilon) + xlogy(erasures, delta) + xlogy(n - flips - erasures, 1.0 - epsilon - delta)
            )
            if log_prob == LOG_ZERO:
                continue
            visited += 1
            log_type = float(_log_trinomial(n, flips, erasures))
            log_union = _hybrid_log_union(n, log_s, support, flips, erasures)
            if log_union < log_type:
                union_terms.append(log_prob + log_union)
            else:
                noise_terms.append(log_prob + log_type)

    return BoundResult.from_masses(
        "bsc-bec",
        union_mass=log_sum_exp(union_terms),
        noise_mass=log_sum_exp(noise_terms),
        types_visited=visited,
        wall_time=time.perf_counter() - started,
    )


def _hybrid_log_union(n: int, log_s: np.ndarray, support: list[int], flips: int, erasures: int) -> LogValue:
    """Union count: codeword positions split into mu flips, rho erasures, rest correct, with 2 mu + rho >= w."""

    terms: list[LogValue] = []
    for weight in support:
        rho = np.arange(min(erasures, weight) + 1)[:, None]
        mu = np.arange(min(flips, weight) + 1)[None, :]
        inside = _log_trinomial(weight, mu, rho)
        outside = _log_trinomial(n - weight, flips - mu, erasures - rho)
        values = np.where(2 * mu + rho >= weight, inside + outside, LOG_ZERO)
        terms.append(log_s[weight] + log_sum_exp_array(values))
    return log_sum_exp(terms)


def quinary_bound(
    spectrum: WeightSpectrum,
    epsilon: float,
    delta: float,
    gamma: float,
    *,
    pruning_target: float | None = None,
    workers: int | None = None,
    config: EngineConfig | None = None,
) -> BoundResult:
    """Five-level read channel; evaluated through the general type engine."""

    channel = make_quinary(epsilon, delta, gamma)
    result = extended_bound(
        channel,
        spectrum,
        pruning_target=pruning_target,
        workers=workers,
        config=config,
        name="quinary",
    )
    result.diagnostics["weak_error_below_weak_correct"] = gamma > epsilon
    return result
