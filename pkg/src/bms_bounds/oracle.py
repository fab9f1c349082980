"""Exhaustive and Monte-Carlo ML decoding with ties counted as errors."""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from pydantic import BaseModel, Field, model_validator

from .channels import BmsChannel, error_type_mask
from .config import EngineConfig
from .errors import BudgetExceededError, ParameterError
from .scheduler import map_ordered
from .spectrum.models import Codebook

logger = logging.getLogger(__name__)

LIKELIHOOD_TIE_RTOL = 1e-12
SEED_LIMIT = 2**64


class SimResult(BaseModel):
    trials: int = Field(..., ge=1)
    errors: int = Field(..., ge=0)
    fer: float = Field(..., ge=0.0, le=1.0)
    stderr: float = Field(..., ge=0.0)
    seed: int

    @model_validator(mode="after")
    def check_counts(self) -> "SimResult":
        if self.errors > self.trials:
            raise ValueError("more errors than trials")
        return self


@dataclass(frozen=True)
class DecodeResult:
    index: int
    tie: bool
    log_likelihood: float


def error_flags(llr_values: np.ndarray, positions: np.ndarray, differences: np.ndarray) -> np.ndarray:
    """Per received word, whether some competitor is at least as likely as the reference.

    ``positions`` holds symbol positions (0..q-1) already mapped so the
    reference codeword looks like all-zero; ``differences`` are the nonzero
    XORs between competitors and the reference.
    """

    q = len(llr_values)
    one_hot = np.eye(q, dtype=np.int64)[positions]
    counts = np.einsum("kn,bnq->bkq", differences.astype(np.int64), one_hot)
    mask = error_type_mask(llr_values, [counts[..., symbol] for symbol in range(q)])
    return mask.any(axis=1)


def _batch_size(codewords: int, n: int, q: int, cells: int) -> int:
    return max(1, cells // max(1, codewords * q * max(n, 1)))


def exact_ml_error(
    channel: BmsChannel,
    codebook: Codebook,
    *,
    transmitted: int = 0,
    config: EngineConfig | None = None,
) -> float:
    """Sum of P(y | c) over every output word y on which ML decoding of c can fail."""

    config = config or EngineConfig()
    q, n = channel.alphabet_size, codebook.n
    required = q**n
    if required > config.oracle_max_outputs:
        raise BudgetExceededError("exhaustive output enumeration", required, config.oracle_max_outputs)
    if codebook.generator is None and not codebook.is_linear():
        raise ParameterError("exhaustive oracle needs a linear codebook")
    if not 0 <= transmitted < codebook.size:
        raise ParameterError(f"codeword index {transmitted} outside 0..{codebook.size - 1}")

    reference = codebook.words[transmitted].astype(bool)
    differences = codebook.words ^ codebook.words[transmitted]
    differences = differences[differences.any(axis=1)]
    if differences.shape[0] == 0:
        return 0.0

    llr_values = channel.llr_vector()
    p0 = np.asarray(channel.p0)
    place = q ** np.arange(n, dtype=np.int64)
    batch = _batch_size(differences.shape[0], n, q, config.max_grid_cells)

    partials: list[float] = []
    for start in range(0, required, batch):
        indices = np.arange(start, min(start + batch, required), dtype=np.int64)
        outputs = (indices[:, None] // place[None, :]) % q
        # mirror the positions where the reference sends a one
        mapped = np.where(reference[None, :], q - 1 - outputs, outputs)
        probabilities = np.prod(p0[mapped], axis=1)
        flags = error_flags(llr_values, mapped, differences)
        partials.append(math.fsum(probabilities[flags]))
    return min(1.0, math.fsum(partials))


def _simulate_block(task: tuple[BmsChannel, np.ndarray, int, int, int]) -> int:
    channel, differences, seed, block_index, size = task
    rng = np.random.default_rng(np.random.SeedSequence([seed, block_index]))
    positions = rng.choice(channel.alphabet_size, size=(size, differences.shape[1]), p=np.asarray(channel.p0))
    llr_values = channel.llr_vector()
    errors = 0
    step = _batch_size(differences.shape[0], differences.shape[1], channel.alphabet_size, 1 << 22)
    for start in range(0, size, step):
        errors += int(error_flags(llr_values, positions[start : start + step], differences).sum())
    return errors


def simulate_fer(
    channel: BmsChannel,
    codebook: Codebook,
    trials: int,
    seed: int,
    *,
    workers: int | None = None,
    config: EngineConfig | None = None,
) -> SimResult:
    """Frame error rate of the all-zero word over ``trials`` seeded channel uses.

    Trials are split into fixed-size blocks seeded by (seed, block index),
    so the result does not depend on the worker count.
    """

    config = config or EngineConfig()
    if trials < 1:
        raise ParameterError(f"trials={trials} must be at least 1")
    if not 0 <= seed < SEED_LIMIT:
        raise ParameterError(f"seed={seed} must be a 64-bit unsigned integer")

    differences = codebook.nonzero_words
    if differences.shape[0] == 0:
        return SimResult(trials=trials, errors=0, fer=0.0, stderr=0.0, seed=seed)

    block = config.simulation_block_trials
    tasks = [
        (channel, differences, seed, index, min(block, trials - start))
        for index, start in enumerate(range(0, trials, block))
    ]
    errors = sum(map_ordered(_simulate_block, tasks, max_workers=workers))
    fer = errors / trials
    logger.debug("simulated %d trials in %d blocks: %d errors", trials, len(tasks), errors)
    return SimResult(
        trials=trials,
        errors=errors,
        fer=fer,
        stderr=math.sqrt(fer * (1.0 - fer) / trials),
        seed=seed,
    )


def ml_decode(channel: BmsChannel, received: Sequence[int], codebook: Codebook) -> DecodeResult:
    """Most likely codeword (lowest index on ties) and whether the maximum is shared."""

    symbols = np.asarray(received, dtype=np.int64)
    half = channel.half_width
    if symbols.shape != (codebook.n,):
        raise ParameterError(f"received word has shape {symbols.shape}, expected ({codebook.n},)")
    if np.any(np.abs(symbols) > half):
        raise ParameterError(f"received symbols must lie in -{half}..{half}")

    with np.errstate(divide="ignore"):
        log_p0 = np.log(np.asarray(channel.p0))
    positions = symbols + half
    log_zero_side = log_p0[positions]
    log_one_side = log_p0[channel.alphabet_size - 1 - positions]
    words = codebook.words.astype(bool)
    log_likelihood = np.where(words, log_one_side[None, :], log_zero_side[None, :]).sum(axis=1)

    best = int(np.argmax(log_likelihood))
    top = log_likelihood[best]
    shared = np.isclose(log_likelihood, top, rtol=LIKELIHOOD_TIE_RTOL, atol=0.0)
    return DecodeResult(index=best, tie=bool(shared.sum() > 1), log_likelihood=float(top))
