"""Random-coding exponent and the Shulman-Feder comparison bound."""

from __future__ import annotations

import logging
import math

import numpy as np
from pydantic import BaseModel, Field
from scipy.optimize import minimize_scalar

from .bounds.models import BoundResult
from .channels import BmsChannel, channel_capacity
from .errors import ParameterError
from .spectrum.generate import log_binomial_ensemble
from .spectrum.models import WeightSpectrum

logger = logging.getLogger(__name__)

RHO_TOLERANCE = 1e-10


class ExponentResult(BaseModel):
    """E_r(R) in bits with its maximizing rho, plus 2^(-n E_r) when n is known."""

    rate: float = Field(..., ge=0.0)
    e_r: float = Field(..., ge=0.0)
    rho_star: float = Field(..., ge=0.0, le=1.0)
    n: int | None = Field(default=None, ge=1)
    bound: float | None = Field(default=None, ge=0.0, le=1.0)


def gallager_e0(channel: BmsChannel, rho: float) -> float:
    """E_0(rho) in bits at uniform input; zero-probability outputs add nothing."""

    if math.isnan(rho) or not 0.0 <= rho <= 1.0:
        raise ParameterError(f"rho={rho} must lie in [0, 1]")
    p0 = np.asarray(channel.p0)
    p1 = p0[::-1]
    power = 1.0 / (1.0 + rho)
    inner = 0.5 * p0**power + 0.5 * p1**power
    total = math.fsum(inner ** (1.0 + rho))
    return -math.log2(total) if total > 0 else 0.0


def gallager_exponent(channel: BmsChannel, rate: float, *, n: int | None = None) -> ExponentResult:
    """max over rho in [0, 1] of E_0(rho) - rho R.

    E_0 is concave in rho, so a bounded scalar search plus both endpoints
    finds the global maximum.
    """

    if math.isnan(rate) or not 0.0 <= rate <= 1.0:
        raise ParameterError(f"rate={rate} must lie in [0, 1]")

    def objective(rho: float) -> float:
        return gallager_e0(channel, rho) - rho * rate

    if rate >= channel_capacity(channel):
        best_rho, best_value = 0.0, 0.0
    else:
        found = minimize_scalar(
            lambda rho: -objective(rho),
            bounds=(0.0, 1.0),
            method="bounded",
            options={"xatol": RHO_TOLERANCE},
        )
        candidates = [(0.0, 0.0), (1.0, objective(1.0)), (float(found.x), objective(float(found.x)))]
        best_rho, best_value = max(candidates, key=lambda item: item[1])
        if best_value <= 0.0:
            best_rho, best_value = 0.0, 0.0

    bound = None if n is None else min(1.0, 2.0 ** (-n * best_value))
    return ExponentResult(rate=rate, e_r=best_value, rho_star=best_rho, n=n, bound=bound)


def gallager_bound(channel: BmsChannel, n: int, rate: float) -> BoundResult:
    """Random-coding benchmark 2^(-n E_r(R)) as a bound result."""

    exponent = gallager_exponent(channel, rate, n=n)
    return BoundResult.from_masses(
        "gallager",
        noise_mass=-n * exponent.e_r * math.log(2.0),
        diagnostics={
            "e_r": exponent.e_r,
            "rho_star": exponent.rho_star,
            "rate": rate,
            "capacity": channel_capacity(channel),
        },
    )


def shulman_feder(channel: BmsChannel, spectrum: WeightSpectrum, *, rate: float | None = None) -> BoundResult:
    """Random-coding exponent at a rate penalized by the worst spectrum-to-ensemble ratio."""

    n = spectrum.n
    if rate is None:
        if spectrum.k is None:
            raise ParameterError(f"spectrum '{spectrum.label}' has no dimension k and no rate was given")
        dimension: float = spectrum.k
    else:
        dimension = rate * n
    rate = dimension / n
    support = spectrum.support
    if not support:
        raise ParameterError(f"spectrum '{spectrum.label}' has no nonzero codeword")

    ensemble = log_binomial_ensemble(n, dimension)
    log_s = spectrum.log_array()
    log_alpha = max(float(log_s[weight] - ensemble[weight]) for weight in support)
    effective_rate = rate + log_alpha / math.log(2.0) / n
    capacity = channel_capacity(channel)

    if effective_rate >= min(capacity, 1.0):
        e_r, rho_star = 0.0, 0.0
    else:
        exponent = gallager_exponent(channel, max(effective_rate, 0.0))
        e_r, rho_star = exponent.e_r, exponent.rho_star
    logger.debug("shulman-feder alpha=%.6g effective rate=%.6g E_r=%.6g", math.exp(log_alpha), effective_rate, e_r)

    return BoundResult.from_masses(
        "sf",
        noise_mass=-n * e_r * math.log(2.0),
        diagnostics={
            "alpha": math.exp(log_alpha),
            "effective_rate": effective_rate,
            "e_r": e_r,
            "rho_star": rho_star,
            "capacity": capacity,
        },
    )
