"""Type-enumeration engine shared by the extended and rectangular bounds.

Every output type ``ell`` contributes

    P(T(ell)) * min(1, sum_w S_w / C(n, w) * sum_{mu <= ell, |mu| = w, error} prod_j C(ell_j, mu_j))

which is the min of the union arm and the type-class probability, written
relative to the multinomial so both arms share one log-domain factor.
"""

from __future__ import annotations

import logging
import math
import time
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from ..channels import BmsChannel, error_type_mask
from ..combinatorics import (
    LOG_ZERO,
    LogValue,
    TypeVector,
    enumerate_subtypes,
    log_factorials,
    log_multinomial,
    log_sum_exp,
    log_sum_exp_array,
    log_type_probability,
)
from ..config import EngineConfig
from ..errors import ParameterError
from ..scheduler import map_ordered
from ..spectrum.models import WeightSpectrum
from .models import RectLimits

logger = logging.getLogger(__name__)


@dataclass
class ChunkTotals:
    union_terms: list[LogValue] = field(default_factory=list)
    noise_terms: list[LogValue] = field(default_factory=list)
    pruned_terms: list[LogValue] = field(default_factory=list)
    inside_terms: list[LogValue] = field(default_factory=list)
    types_visited: int = 0
    types_pruned: int = 0


@dataclass(frozen=True)
class EngineTotals:
    union_mass: LogValue
    noise_mass: LogValue
    pruned_mass: LogValue
    inside_mass: LogValue
    types_visited: int
    types_pruned: int
    wall_time: float


class TypeEvaluator:
    """Per-type union/noise arm selection for one (channel, spectrum) pair."""

    def __init__(
        self,
        channel: BmsChannel,
        spectrum: WeightSpectrum,
        *,
        config: EngineConfig | None = None,
        log_threshold: LogValue | None = None,
    ) -> None:
        self.channel = channel
        self.spectrum = spectrum
        self.config = config or EngineConfig()
        self.log_threshold = log_threshold
        self.n = spectrum.n
        self.llr = channel.llr_vector()

        table = log_factorials()
        table.ensure(self.n)
        weights = np.arange(self.n + 1)
        log_counts = spectrum.log_array()
        lw = log_counts - table.log_binomial(np.full(self.n + 1, self.n), weights)
        lw[0] = LOG_ZERO
        lw[~np.isfinite(log_counts)] = LOG_ZERO
        self.weight_log_ratio = lw

    def log_union_ratio(self, ell: Sequence[int]) -> LogValue:
        """ln of the union arm over the multinomial; >= 0 means the noise arm wins."""

        table = log_factorials()
        q = len(ell)
        row_caps = [int(count) + 1 for count in ell[1:]]
        if q > 1:
            rows = np.indices(row_caps).reshape(q - 1, -1).T
        else:
            rows = np.zeros((1, 0), dtype=np.int64)
        anchor = np.arange(int(ell[0]) + 1)

        log_choose = [table.log_binomial(np.full(int(count) + 1, int(count)), np.arange(int(count) + 1)) for count in ell]
        row_log = np.zeros(rows.shape[0])
        for position in range(1, q):
            row_log = row_log + log_choose[position][rows[:, position - 1]]
        row_weight = rows.sum(axis=1)

        chunk_rows = max(1, self.config.max_grid_cells // anchor.size)
        partials: list[LogValue] = []
        for start in range(0, rows.shape[0], chunk_rows):
            stop = min(start + chunk_rows, rows.shape[0])
            block = rows[start:stop]
            weight = row_weight[start:stop, None] + anchor[None, :]
            values = row_log[start:stop, None] + log_choose[0][None, :] + self.weight_log_ratio[weight]
            counts = [anchor[None, :]] + [block[:, index][:, None] for index in range(q - 1)]
            mask = error_type_mask(self.llr, counts, rtol=self.config.tie_relative_tolerance)
            partials.append(log_sum_exp_array(np.where(mask, values, LOG_ZERO)))
            # once the union arm reaches the multinomial the min is decided
            if log_sum_exp(partials) >= 0.0:
                break
        return log_sum_exp(partials)

    def evaluate(self, types: Sequence[TypeVector]) -> ChunkTotals:
        totals = ChunkTotals()
        for ell in types:
            log_mass = log_multinomial(ell) + log_type_probability(self.channel, ell)
            if log_mass == LOG_ZERO:
                continue
            totals.inside_terms.append(log_mass)
            if self.log_threshold is not None and log_mass < self.log_threshold:
                totals.pruned_terms.append(log_mass)
                totals.types_pruned += 1
                continue
            totals.types_visited += 1
            log_ratio = self.log_union_ratio(ell)
            if log_ratio < 0.0:
                totals.union_terms.append(log_mass + log_ratio)
            else:
                totals.noise_terms.append(log_mass)
        return totals


def outer_types(n: int, alphabet_size: int, caps: Sequence[int] | None = None) -> list[TypeVector]:
    """Types of length n whose non-anchor counts respect ``caps``, by non-anchor total."""

    if alphabet_size == 1:
        return [TypeVector((n,))]
    caps = tuple(caps) if caps is not None else (n,) * (alphabet_size - 1)
    if len(caps) != alphabet_size - 1:
        raise ParameterError(f"rectangle has {len(caps)} caps, channel needs {alphabet_size - 1}")
    caps = tuple(min(int(cap), n) for cap in caps)
    types: list[TypeVector] = []
    for rest_total in range(min(n, sum(caps)) + 1):
        for rest in enumerate_subtypes(rest_total, caps):
            types.append(TypeVector((n - rest_total,) + tuple(rest)))
    return types


def pruning_threshold(target: float | None, margin: float) -> LogValue | None:
    if target is None:
        return None
    if not 0.0 < target <= 1.0:
        raise ParameterError(f"pruning target {target} must lie in (0, 1]")
    return math.log(target) - margin


def run_engine(
    channel: BmsChannel,
    spectrum: WeightSpectrum,
    *,
    limits: RectLimits | None = None,
    pruning_target: float | None = None,
    workers: int | None = None,
    config: EngineConfig | None = None,
) -> EngineTotals:
    """Enumerate outer types in fixed chunks, evaluate them on the pool, reduce with fsum."""

    config = config or EngineConfig()
    started = time.perf_counter()
    if limits is not None and limits.n != spectrum.n:
        raise ParameterError(f"rectangle built for n={limits.n}, spectrum has n={spectrum.n}")
    if limits is not None and len(limits.m) != channel.alphabet_size - 1:
        raise ParameterError(
            f"rectangle has {len(limits.m)} caps, channel alphabet of size {channel.alphabet_size} needs {channel.alphabet_size - 1}"
        )

    evaluator = TypeEvaluator(
        channel,
        spectrum,
        config=config,
        log_threshold=pruning_threshold(pruning_target, config.pruning_log_margin),
    )
    types = outer_types(spectrum.n, channel.alphabet_size, None if limits is None else limits.m)
    chunks = [types[start : start + config.type_chunk_size] for start in range(0, len(types), config.type_chunk_size)]
    results = map_ordered(evaluator.evaluate, chunks, max_workers=workers)

    totals = EngineTotals(
        union_mass=log_sum_exp(term for chunk in results for term in chunk.union_terms),
        noise_mass=log_sum_exp(term for chunk in results for term in chunk.noise_terms),
        pruned_mass=log_sum_exp(term for chunk in results for term in chunk.pruned_terms),
        inside_mass=log_sum_exp(term for chunk in results for term in chunk.inside_terms),
        types_visited=sum(chunk.types_visited for chunk in results),
        types_pruned=sum(chunk.types_pruned for chunk in results),
        wall_time=time.perf_counter() - started,
    )
    logger.debug(
        "engine n=%d q=%d: %d types visited, %d pruned in %.3fs",
        spectrum.n,
        channel.alphabet_size,
        totals.types_visited,
        totals.types_pruned,
        totals.wall_time,
    )
    return totals
