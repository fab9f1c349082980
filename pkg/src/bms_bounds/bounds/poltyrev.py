"""Classic BSC bound indexed by the number of flipped positions."""

from __future__ import annotations

import math
import time

import numpy as np
from scipy.special import xlogy

from ..combinatorics import LOG_ZERO, LogValue, exact_binomial, log_factorials, log_sum_exp, log_sum_exp_array
from ..errors import ParameterError
from ..spectrum.models import WeightSpectrum
from .models import BoundResult


def _check_epsilon(epsilon: float) -> None:
    if math.isnan(epsilon) or not 0.0 <= epsilon <= 0.5:
        raise ParameterError(f"epsilon={epsilon} must lie in [0, 0.5]")


def _require_d_min(spectrum: WeightSpectrum) -> int:
    d_min = spectrum.d_min
    if d_min is None:
        raise ParameterError(f"spectrum '{spectrum.label}' has no nonzero codeword (d_min undefined)")
    return d_min


def log_union_counts(spectrum: WeightSpectrum) -> np.ndarray:
    """ln sum_{w <= 2l} S_w sum_{mu >= ceil(w/2)} C(w, mu) C(n - w, l - mu) for l = 0..n."""

    n = spectrum.n
    table = log_factorials()
    log_s = spectrum.log_array()
    result = np.full(n + 1, LOG_ZERO)
    for flips in range(n + 1):
        terms: list[LogValue] = []
        for weight in spectrum.support:
            if weight > 2 * flips:
                break
            mu = np.arange((weight + 1) // 2, min(flips, weight) + 1)
            values = (
                table.log_binomial(np.full(mu.size, weight), mu)
                + table.log_binomial(np.full(mu.size, n - weight), flips - mu)
            )
            terms.append(log_s[weight] + log_sum_exp_array(values))
        result[flips] = log_sum_exp(terms)
    return result


def _exact_union_count(spectrum: WeightSpectrum, flips: int) -> int:
    assert spectrum.exact_s is not None
    n = spectrum.n
    total = 0
    for weight in spectrum.support:
        if weight > 2 * flips:
            break
        inner = sum(
            exact_binomial(weight, mu) * exact_binomial(n - weight, flips - mu)
            for mu in range((weight + 1) // 2, min(flips, weight) + 1)
        )
        total += spectrum.exact_s[weight] * inner
    return total


def _log_flip_probabilities(n: int, epsilon: float) -> np.ndarray:
    flips = np.arange(n + 1)
    return xlogy(flips, epsilon) + xlogy(n - flips, 1.0 - epsilon)


def poltyrev_bsc(spectrum: WeightSpectrum, epsilon: float) -> BoundResult:
    """min(union, binomial) per number of flips, summed over all flip counts."""

    _check_epsilon(epsilon)
    d_min = _require_d_min(spectrum)
    if epsilon == 0.0:
        return BoundResult.zero("poltyrev", zeta=zeta_star(spectrum, epsilon))

    started = time.perf_counter()
    n = spectrum.n
    log_union = log_union_counts(spectrum)
    log_binomial = log_factorials().log_binomial(np.full(n + 1, n), np.arange(n + 1))
    log_prob = _log_flip_probabilities(n, epsilon)

    union_terms: list[LogValue] = []
    noise_terms: list[LogValue] = []
    for flips in range(n + 1):
        if log_union[flips] < log_binomial[flips]:
            union_terms.append(log_prob[flips] + log_union[flips])
        else:
            noise_terms.append(log_prob[flips] + log_binomial[flips])

    return BoundResult.from_masses(
        "poltyrev",
        union_mass=log_sum_exp(union_terms),
        noise_mass=log_sum_exp(noise_terms),
        types_visited=n + 1,
        wall_time=time.perf_counter() - started,
        diagnostics={"zeta": zeta_star(spectrum, epsilon), "d_min": d_min},
    )


def zeta_star(spectrum: WeightSpectrum, epsilon: float) -> int:
    """Smallest flip count whose union count reaches C(n, l); n + 1 if none.

    Independent of epsilon; the argument only mirrors the bound signature.
    """

    _check_epsilon(epsilon)
    n = spectrum.n
    if spectrum.exact_s is not None:
        for flips in range(n + 1):
            if _exact_union_count(spectrum, flips) >= exact_binomial(n, flips):
                return flips
        return n + 1

    log_union = log_union_counts(spectrum)
    log_binomial = log_factorials().log_binomial(np.full(n + 1, n), np.arange(n + 1))
    for flips in range(n + 1):
        if log_union[flips] >= log_binomial[flips] - 1e-12 * max(1.0, abs(log_binomial[flips])):
            return flips
    return n + 1


def poltyrev_split(spectrum: WeightSpectrum, epsilon: float, zeta: int) -> BoundResult:
    """Union bound below ``zeta`` flips plus the binomial tail from ``zeta`` on."""

    _check_epsilon(epsilon)
    _require_d_min(spectrum)
    n = spectrum.n
    if not 0 <= zeta <= n + 1:
        raise ParameterError(f"split point {zeta} outside 0..{n + 1}")
    if epsilon == 0.0:
        return BoundResult.zero("poltyrev-split", zeta=zeta)

    log_union = log_union_counts(spectrum)
    log_binomial = log_factorials().log_binomial(np.full(n + 1, n), np.arange(n + 1))
    log_prob = _log_flip_probabilities(n, epsilon)
    return BoundResult.from_masses(
        "poltyrev-split",
        union_mass=log_sum_exp(log_prob[:zeta] + log_union[:zeta]),
        noise_mass=log_sum_exp(log_prob[zeta:] + log_binomial[zeta:]),
        types_visited=n + 1,
        diagnostics={"zeta": zeta},
    )
