"""Runtime configuration defaults for the bounds toolkit."""

from __future__ import annotations

import os
from dataclasses import dataclass

THREADS_ENV_VAR = "BMS_BOUNDS_THREADS"

PROBABILITY_SUM_TOLERANCE = 1e-12
TIE_RELATIVE_TOLERANCE = 1e-12
PRUNING_LOG_MARGIN = 30.0
DEFAULT_SIGMA_COUNT = 8.0
BRUTE_FORCE_MAX_DIMENSION = 24
ORACLE_MAX_OUTPUTS = 10**7
SIMULATION_BLOCK_TRIALS = 4096
TYPE_CHUNK_SIZE = 256
MAX_GRID_CELLS = 1 << 20


def default_thread_count() -> int:
    """Worker count from the environment, else the hardware parallelism."""

    raw = os.environ.get(THREADS_ENV_VAR)
    if raw:
        try:
            return max(int(raw), 1)
        except ValueError:
            pass
    return os.cpu_count() or 1


@dataclass(frozen=True)
class EngineConfig:
    """Budgets and thresholds used by the bound engine and the oracles."""

    tie_relative_tolerance: float = TIE_RELATIVE_TOLERANCE
    pruning_log_margin: float = PRUNING_LOG_MARGIN
    sigma_count: float = DEFAULT_SIGMA_COUNT
    brute_force_max_dimension: int = BRUTE_FORCE_MAX_DIMENSION
    oracle_max_outputs: int = ORACLE_MAX_OUTPUTS
    simulation_block_trials: int = SIMULATION_BLOCK_TRIALS
    type_chunk_size: int = TYPE_CHUNK_SIZE
    max_grid_cells: int = MAX_GRID_CELLS
