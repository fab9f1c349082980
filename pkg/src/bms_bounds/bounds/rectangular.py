"""Bounds restricted to a rectangular set of output types."""

from __future__ import annotations

import math

import numpy as np
from scipy.special import rel_entr

from ..channels import BmsChannel
from ..combinatorics import LOG_ZERO, LogValue, log1m_exp, log_sum_exp
from ..config import DEFAULT_SIGMA_COUNT, EngineConfig
from ..errors import ParameterError
from ..spectrum.models import WeightSpectrum
from .engine import EngineTotals, run_engine
from .models import BoundResult, RectLimits


def choose_rect(channel: BmsChannel, n: int, sigma_count: float = DEFAULT_SIGMA_COUNT) -> RectLimits:
    """Cap each symbol at its mean count plus ``sigma_count`` binomial standard deviations."""

    if not sigma_count > 0:
        raise ParameterError(f"sigma_count={sigma_count} must be positive")
    if n < 1:
        raise ParameterError(f"block length {n} must be positive")
    caps = []
    for symbol in list(channel.symbols)[1:]:
        probability = channel.prob(symbol)
        spread = sigma_count * math.sqrt(n * probability * (1.0 - probability))
        caps.append(min(n, math.ceil(n * probability + spread)))
    return RectLimits(m=tuple(caps), n=n)


def _rect_diagnostics(limits: RectLimits, totals: EngineTotals) -> dict:
    return {"rect_m": limits.describe(), "types_pruned": totals.types_pruned}


def rect_bound(
    channel: BmsChannel,
    spectrum: WeightSpectrum,
    limits: RectLimits,
    *,
    pruning_target: float | None = None,
    workers: int | None = None,
    config: EngineConfig | None = None,
) -> BoundResult:
    """Min-form sum inside the rectangle plus the exact probability of leaving it."""

    totals = run_engine(
        channel, spectrum, limits=limits, pruning_target=pruning_target, workers=workers, config=config
    )
    outside = LOG_ZERO if limits.covers_everything() else log1m_exp(totals.inside_mass)
    diagnostics = _rect_diagnostics(limits, totals)
    diagnostics["outside_mass"] = outside
    return BoundResult.from_masses(
        "rect",
        union_mass=totals.union_mass,
        noise_mass=log_sum_exp([totals.noise_mass, outside]),
        pruned_mass=totals.pruned_mass,
        types_visited=totals.types_visited,
        wall_time=totals.wall_time,
        diagnostics=diagnostics,
    )


def chernoff_log_tail(channel: BmsChannel, limits: RectLimits) -> LogValue:
    """ln sum_j exp(-n D(m_j/n || P(j|0))) over the capped symbols.

    Symbols that can never exceed their cap contribute nothing.
    """

    n = limits.n
    terms: list[LogValue] = []
    for symbol in list(channel.symbols)[1:]:
        probability = channel.prob(symbol)
        cap = limits.cap(symbol)
        if probability == 0.0 or cap >= n:
            continue
        fraction = cap / n
        if fraction < probability:
            raise ParameterError(
                f"Chernoff tail needs m_j/n >= P(j|0) for symbol j={symbol}: {fraction:.6g} < {probability:.6g}"
            )
        divergence = float(rel_entr(fraction, probability) + rel_entr(1.0 - fraction, 1.0 - probability))
        terms.append(-n * divergence)
    return log_sum_exp(terms)


def rect_bound_chernoff(
    channel: BmsChannel,
    spectrum: WeightSpectrum,
    limits: RectLimits,
    *,
    pruning_target: float | None = None,
    workers: int | None = None,
    config: EngineConfig | None = None,
) -> BoundResult:
    """Rectangle bound with the outside mass replaced by per-symbol Chernoff tails."""

    if len(limits.m) != channel.alphabet_size - 1:
        raise ParameterError(f"rectangle has {len(limits.m)} caps, channel needs {channel.alphabet_size - 1}")
    log_tail = chernoff_log_tail(channel, limits)
    totals = run_engine(
        channel, spectrum, limits=limits, pruning_target=pruning_target, workers=workers, config=config
    )
    diagnostics = _rect_diagnostics(limits, totals)
    diagnostics["chernoff_tail"] = float(np.exp(log_tail))
    return BoundResult.from_masses(
        "chernoff",
        union_mass=totals.union_mass,
        noise_mass=log_sum_exp([totals.noise_mass, log_tail]),
        pruned_mass=totals.pruned_mass,
        types_visited=totals.types_visited,
        wall_time=totals.wall_time,
        diagnostics=diagnostics,
    )
