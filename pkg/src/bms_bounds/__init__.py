"""Error-probability bounds for binary linear codes over discrete BMS channels."""

__version__ = "0.1.0"

from .channels import BmsChannel, make_bec, make_bsc, make_bsc_bec, make_channel, make_quinary, make_raw
from .config import EngineConfig
from .errors import BoundsError, BudgetExceededError, ParameterError, RankError, SpectrumLoadError
from .spectrum import WeightSpectrum, binomial_spectrum, load_spectrum

__all__ = [
    "BmsChannel",
    "BoundResult",
    "BoundsError",
    "BudgetExceededError",
    "EngineConfig",
    "ParameterError",
    "RankError",
    "SpectrumLoadError",
    "WeightSpectrum",
    "binomial_spectrum",
    "exact_ml_error",
    "extended_bound",
    "gallager_exponent",
    "load_spectrum",
    "make_bec",
    "make_bsc",
    "make_bsc_bec",
    "make_channel",
    "make_quinary",
    "make_raw",
    "shulman_feder",
    "simulate_fer",
]


def __getattr__(name: str):
    if name in ("BoundResult", "extended_bound"):
        from . import bounds

        return getattr(bounds, name)
    if name in ("gallager_exponent", "shulman_feder"):
        from . import baselines

        return getattr(baselines, name)
    if name in ("exact_ml_error", "simulate_fer"):
        from . import oracle

        return getattr(oracle, name)
    raise AttributeError(f"module 'bms_bounds' has no attribute {name!r}")
