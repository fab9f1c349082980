"""Structured run configuration, parameter grids, and CSV row building."""

from __future__ import annotations

import csv
import hashlib
import itertools
import json
import logging
import math
import time
from collections.abc import Iterable
from functools import partial
from pathlib import Path
from typing import Any, Literal, TextIO, TypeVar

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .baselines import gallager_bound, shulman_feder
from .bounds import (
    BoundResult,
    RectLimits,
    bec_bound,
    bsc_bec_bound,
    choose_rect,
    extended_bound,
    make_limits,
    poltyrev_bsc,
    quinary_bound,
    rect_bound,
    rect_bound_chernoff,
)
from .channels import BmsChannel, make_channel, make_raw
from .config import DEFAULT_SIGMA_COUNT, EngineConfig
from .errors import BoundsError, ParameterError
from .oracle import exact_ml_error, simulate_fer
from .scheduler import map_ordered
from .spectrum import (
    Codebook,
    WeightSpectrum,
    binomial_spectrum,
    brute_force_spectrum,
    load_generator,
    load_spectrum,
)

logger = logging.getLogger(__name__)

BOUND_NAMES = ("poltyrev", "extended", "bec", "bsc-bec", "quinary", "rect", "chernoff", "sf", "gallager")
RECT_BOUNDS = ("rect", "chernoff")
FAMILY_PARAMETERS: dict[str, tuple[str, ...]] = {
    "bsc": ("epsilon",),
    "bec": ("delta",),
    "bsc-bec": ("epsilon", "delta"),
    "quinary": ("epsilon", "delta", "gamma"),
    "raw": (),
}
NON_SEMANTIC_FIELDS = {"threads", "output", "timing"}
LOG_SPACING_CEILING = 0.1
MARGIN_TOLERANCE = 1e-12
SIGMA_WIDTH = 4.0

BOUND_COLUMNS = (
    "bound_name",
    "family",
    "epsilon",
    "delta",
    "gamma",
    "n",
    "k",
    "value",
    "log10_value",
    "union_mass",
    "noise_mass",
    "pruned_mass",
    "types_visited",
    "rect_m",
    "wall_ms",
    "status",
    "message",
)
VERIFY_COLUMNS = (
    "bound_name",
    "family",
    "epsilon",
    "delta",
    "gamma",
    "n",
    "k",
    "value",
    "exact",
    "simulated_fer",
    "simulated_stderr",
    "margin",
    "status",
    "message",
)

Model = TypeVar("Model", bound=BaseModel)


class ChannelSpec(BaseModel):
    """Channel family plus its fixed parameters."""

    model_config = ConfigDict(extra="forbid")

    family: Literal["bsc", "bec", "bsc-bec", "quinary", "raw"] = "bsc"
    epsilon: float = Field(default=0.0, ge=0.0, le=1.0)
    delta: float = Field(default=0.0, ge=0.0, le=1.0)
    gamma: float = Field(default=0.0, ge=0.0, le=1.0)
    p0: tuple[float, ...] | None = None

    @model_validator(mode="after")
    def check_raw(self) -> "ChannelSpec":
        if (self.family == "raw") != (self.p0 is not None):
            raise ValueError("p0 is given exactly when the family is 'raw'")
        return self

    def parameters(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in FAMILY_PARAMETERS[self.family]}

    def build(self) -> BmsChannel:
        if self.p0 is not None:
            return make_raw(self.p0)
        return make_channel(self.family, **self.parameters())

    def with_value(self, name: str, value: float) -> "ChannelSpec":
        return self.model_copy(update={name: float(value)})


class SpectrumSourceMixin(BaseModel):
    spectrum: Path | None = None
    generator: Path | None = None
    binomial: tuple[int, int] | None = None
    n: int | None = Field(default=None, ge=1)
    k: int | None = Field(default=None, ge=0)


class SweepConfig(SpectrumSourceMixin):
    """One evaluation point or a one-parameter sweep over a channel family."""

    model_config = ConfigDict(extra="forbid")

    channel: ChannelSpec = Field(default_factory=ChannelSpec)
    sweep: Literal["epsilon", "delta", "gamma"] | None = None
    start: float | None = None
    stop: float | None = None
    points: int = Field(default=1, ge=1)
    spacing: Literal["auto", "linear", "log"] = "auto"
    bounds: list[str] = Field(default_factory=lambda: ["extended"])
    rect: str | None = None
    sigma_count: float = Field(default=DEFAULT_SIGMA_COUNT, gt=0.0)
    pruning_target: float | None = Field(default=None, gt=0.0, le=1.0)
    output: Path | None = None
    threads: int | None = Field(default=None, ge=1)
    timing: bool = False

    @model_validator(mode="after")
    def check_sweep(self) -> "SweepConfig":
        _check_bound_names(self.bounds)
        _check_spectrum_source(self, allow_generator_with_spectrum=False)
        if self.sweep is None:
            return self
        if self.start is None or self.stop is None:
            raise ValueError("a sweep needs both start and stop")
        if not self.start < self.stop:
            raise ValueError(f"sweep start {self.start} must be below stop {self.stop}")
        if self.sweep not in FAMILY_PARAMETERS[self.channel.family]:
            raise ValueError(f"family '{self.channel.family}' has no parameter '{self.sweep}'")
        if self.resolved_spacing() == "log" and self.start <= 0.0:
            raise ValueError("log spacing needs a positive start")
        return self

    def resolved_spacing(self) -> str:
        if self.spacing != "auto":
            return self.spacing
        if self.start is not None and self.stop is not None and self.start > 0.0 and self.stop <= LOG_SPACING_CEILING:
            return "log"
        return "linear"

    def grid(self) -> list[ChannelSpec]:
        if self.sweep is None:
            return [self.channel]
        assert self.start is not None and self.stop is not None
        if self.points == 1:
            values = np.array([self.start])
        elif self.resolved_spacing() == "log":
            values = np.geomspace(self.start, self.stop, self.points)
        else:
            values = np.linspace(self.start, self.stop, self.points)
        return [self.channel.with_value(self.sweep, float(value)) for value in values]

    def semantic_hash(self) -> str:
        return config_hash(self)


class VerifyConfig(SpectrumSourceMixin):
    """Bound-versus-oracle comparison over a grid of channel parameters."""

    model_config = ConfigDict(extra="forbid")

    family: Literal["bsc", "bec", "bsc-bec", "quinary", "raw"] = "bsc-bec"
    epsilon: list[float] = Field(default_factory=lambda: [0.0])
    delta: list[float] = Field(default_factory=lambda: [0.0])
    gamma: list[float] = Field(default_factory=lambda: [0.0])
    p0: tuple[float, ...] | None = None
    bounds: list[str] = Field(default_factory=lambda: ["extended"])
    oracle: Literal["exact", "simulate", "both"] = "exact"
    trials: int = Field(default=100_000, ge=1)
    seed: int = Field(default=0, ge=0, lt=2**64)
    rect: str | None = None
    sigma_count: float = Field(default=DEFAULT_SIGMA_COUNT, gt=0.0)
    output: Path | None = None
    threads: int | None = Field(default=None, ge=1)

    @model_validator(mode="after")
    def check_verify(self) -> "VerifyConfig":
        _check_bound_names(self.bounds)
        if self.generator is None:
            raise ValueError("verify needs a generator matrix for the oracle codebook")
        _check_spectrum_source(self, allow_generator_with_spectrum=True)
        return self

    def grid(self) -> list[ChannelSpec]:
        names = FAMILY_PARAMETERS[self.family]
        axes = [getattr(self, name) for name in names]
        try:
            return [
                ChannelSpec(family=self.family, p0=self.p0, **dict(zip(names, combination)))
                for combination in itertools.product(*axes)
            ]
        except ValidationError as exc:
            raise ParameterError(f"invalid channel grid: {exc.errors()[0]['msg']}") from exc


def _check_bound_names(names: list[str]) -> None:
    if not names:
        raise ValueError("select at least one bound")
    unknown = [name for name in names if name not in BOUND_NAMES]
    if unknown:
        raise ValueError(f"unknown bound(s) {unknown}, expected names from {BOUND_NAMES}")


def _check_spectrum_source(config: SpectrumSourceMixin, *, allow_generator_with_spectrum: bool) -> None:
    sources = [config.spectrum is not None, config.generator is not None, config.binomial is not None]
    if allow_generator_with_spectrum and config.spectrum is not None and config.generator is not None:
        sources[1] = False
    if sum(sources) != 1:
        raise ValueError("give exactly one of spectrum, generator or binomial")


def load_config(model: type[Model], path: Path | None, overrides: dict[str, Any]) -> Model:
    """Merge a JSON config file with flag overrides; flags win."""

    payload: dict[str, Any] = {}
    if path is not None:
        if not path.is_file():
            raise ParameterError(f"config file not found: {path}")
        try:
            payload = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ParameterError(f"{path}:{exc.lineno}: invalid JSON: {exc.msg}") from exc
        if not isinstance(payload, dict):
            raise ParameterError(f"{path}: config must be a JSON object")
    for key, value in overrides.items():
        if isinstance(value, dict):
            payload[key] = {**payload.get(key, {}), **value}
        else:
            payload[key] = value
    try:
        return model.model_validate(payload)
    except ValidationError as exc:
        first = exc.errors()[0]
        location = ".".join(str(part) for part in first["loc"])
        raise ParameterError(f"invalid configuration{' at ' + location if location else ''}: {first['msg']}") from exc


def config_schema() -> dict[str, Any]:
    return {"sweep": SweepConfig.model_json_schema(), "verify": VerifyConfig.model_json_schema()}


def config_hash(config: BaseModel) -> str:
    payload = config.model_dump(mode="json", exclude=NON_SEMANTIC_FIELDS)
    canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def resolve_spectrum(config: SpectrumSourceMixin, *, max_dimension: int) -> tuple[WeightSpectrum, Codebook | None]:
    """Spectrum from file, generator or the binomial ensemble, plus a codebook when one is known."""

    codebook = None
    if config.generator is not None:
        generator = load_generator(config.generator)
        spectrum, codebook = brute_force_spectrum(generator, max_dimension=max_dimension, label=config.generator.stem)
    if config.spectrum is not None:
        spectrum = load_spectrum(config.spectrum, n=config.n, k=config.k)
    elif config.binomial is not None:
        spectrum = binomial_spectrum(*config.binomial)
    if codebook is not None and codebook.n != spectrum.n:
        raise ParameterError(f"spectrum has n={spectrum.n} but the generator has n={codebook.n}")
    return spectrum, codebook


def rect_limits_for(channel: BmsChannel, n: int, rect: str | None, sigma_count: float) -> RectLimits:
    if rect:
        return make_limits(rect, n)
    return choose_rect(channel, n, sigma_count)


def evaluate_bound(
    name: str,
    spec: ChannelSpec,
    spectrum: WeightSpectrum,
    *,
    rect: str | None = None,
    sigma_count: float = DEFAULT_SIGMA_COUNT,
    pruning_target: float | None = None,
    workers: int | None = None,
) -> tuple[BoundResult, RectLimits | None]:
    """Dispatch one named bound at one channel point."""

    channel = spec.build()
    if name == "poltyrev":
        _require_family(name, spec, "bsc")
        return poltyrev_bsc(spectrum, spec.epsilon), None
    if name == "extended":
        return extended_bound(channel, spectrum, pruning_target=pruning_target, workers=workers), None
    if name == "bec":
        _require_family(name, spec, "bec")
        return bec_bound(spectrum, spec.delta), None
    if name == "bsc-bec":
        _require_family(name, spec, "bsc", "bec", "bsc-bec")
        return bsc_bec_bound(spectrum, spec.epsilon, spec.delta), None
    if name == "quinary":
        _require_family(name, spec, "quinary")
        return (
            quinary_bound(spectrum, spec.epsilon, spec.delta, spec.gamma, pruning_target=pruning_target, workers=workers),
            None,
        )
    if name in RECT_BOUNDS:
        limits = rect_limits_for(channel, spectrum.n, rect, sigma_count)
        evaluate = rect_bound if name == "rect" else rect_bound_chernoff
        return evaluate(channel, spectrum, limits, pruning_target=pruning_target, workers=workers), limits
    if name == "sf":
        return shulman_feder(channel, spectrum), None
    if name == "gallager":
        if spectrum.k is None:
            raise ParameterError("gallager bound needs the code dimension k")
        return gallager_bound(channel, spectrum.n, spectrum.k / spectrum.n), None
    raise ParameterError(f"unknown bound '{name}'")


def _require_family(name: str, spec: ChannelSpec, *families: str) -> None:
    if spec.family not in families:
        raise ParameterError(f"bound '{name}' applies to {', '.join(families)} channels, not '{spec.family}'")


def format_float(value: float | None) -> str:
    if value is None:
        return ""
    return format(value, ".15g")


def _channel_columns(spec: ChannelSpec, spectrum: WeightSpectrum) -> dict[str, str]:
    columns = {"family": spec.family, "n": str(spectrum.n), "k": "" if spectrum.k is None else str(spectrum.k)}
    for name in ("epsilon", "delta", "gamma"):
        columns[name] = format_float(getattr(spec, name)) if name in FAMILY_PARAMETERS[spec.family] else ""
    return columns


def bound_row(
    name: str,
    spec: ChannelSpec,
    spectrum: WeightSpectrum,
    result: BoundResult | None,
    *,
    limits: RectLimits | None = None,
    error: Exception | None = None,
    timing: bool = False,
) -> dict[str, str]:
    row = dict.fromkeys(BOUND_COLUMNS, "")
    row.update(_channel_columns(spec, spectrum))
    row["bound_name"] = name
    if result is None:
        row["status"] = "error"
        row["message"] = str(error) if error is not None else "no result"
        return row
    row.update(
        value=format_float(result.p_upper),
        log10_value=format_float(result.log10_value),
        union_mass=format_float(result.union_mass),
        noise_mass=format_float(result.noise_mass),
        pruned_mass=format_float(result.pruned_mass),
        types_visited=str(result.types_visited),
        rect_m="" if limits is None else limits.describe(),
        wall_ms=format_float(round(result.wall_time * 1000.0, 3)) if timing else "",
        status="ok",
    )
    return row


def _evaluate_point(spec: ChannelSpec, *, config: SweepConfig, spectrum: WeightSpectrum, workers: int | None) -> list[dict[str, str]]:
    rows = []
    for name in config.bounds:
        started = time.perf_counter()
        try:
            result, limits = evaluate_bound(
                name,
                spec,
                spectrum,
                rect=config.rect,
                sigma_count=config.sigma_count,
                pruning_target=config.pruning_target,
                workers=workers,
            )
        except BoundsError as exc:
            logger.warning("%s at %s failed: %s", name, spec.parameters(), exc)
            rows.append(bound_row(name, spec, spectrum, None, error=exc))
            continue
        if not result.wall_time:
            result.wall_time = time.perf_counter() - started
        rows.append(bound_row(name, spec, spectrum, result, limits=limits, timing=config.timing))
    return rows


def run_sweep(config: SweepConfig, spectrum: WeightSpectrum, *, threads: int | None = None) -> list[dict[str, str]]:
    """Rows for every (point, bound) pair, in point order."""

    points = config.grid()
    # points run in parallel; a single point parallelizes over its types instead
    point_workers = threads if len(points) > 1 else 1
    engine_workers = 1 if len(points) > 1 else threads
    logger.info("evaluating %d point(s) x %d bound(s)", len(points), len(config.bounds))
    evaluate = partial(_evaluate_point, config=config, spectrum=spectrum, workers=engine_workers)
    per_point = map_ordered(evaluate, points, max_workers=point_workers)
    return [row for rows in per_point for row in rows]


def verify_rows(
    config: VerifyConfig,
    spectrum: WeightSpectrum,
    codebook: Codebook,
    *,
    engine: EngineConfig | None = None,
    threads: int | None = None,
) -> list[dict[str, str]]:
    """Bound value beside the oracle truth per (point, bound), with the soundness margin."""

    rows = []
    for spec in config.grid():
        channel = spec.build()
        exact = simulated = None
        if config.oracle in ("exact", "both"):
            exact = exact_ml_error(channel, codebook, config=engine)
        if config.oracle in ("simulate", "both"):
            simulated = simulate_fer(channel, codebook, config.trials, config.seed, workers=threads, config=engine)
        for name in config.bounds:
            row = dict.fromkeys(VERIFY_COLUMNS, "")
            row.update(_channel_columns(spec, spectrum))
            row["bound_name"] = name
            row["exact"] = format_float(exact)
            if simulated is not None:
                row["simulated_fer"] = format_float(simulated.fer)
                row["simulated_stderr"] = format_float(simulated.stderr)
            try:
                result, _ = evaluate_bound(name, spec, spectrum, rect=config.rect, sigma_count=config.sigma_count, workers=threads)
            except BoundsError as exc:
                row.update(status="error", message=str(exc))
                rows.append(row)
                continue
            margin = soundness_margin(result.p_upper, exact, simulated.fer if simulated else None, simulated.stderr if simulated else None)
            row["value"] = format_float(result.p_upper)
            row["margin"] = format_float(margin)
            row["status"] = "ok" if margin >= -MARGIN_TOLERANCE else "violation"
            rows.append(row)
    return rows


def soundness_margin(bound: float, exact: float | None, fer: float | None, stderr: float | None) -> float:
    """bound - truth; a simulated FER is first lowered by four standard errors."""

    margins = []
    if exact is not None:
        margins.append(bound - exact)
    if fer is not None:
        margins.append(bound - (fer - SIGMA_WIDTH * (stderr or 0.0)))
    return min(margins) if margins else math.inf


def write_csv(rows: Iterable[dict[str, str]], columns: tuple[str, ...], stream: TextIO, *, trailer: str | None = None) -> None:
    writer = csv.DictWriter(stream, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    if trailer:
        stream.write(f"# {trailer}\n")


def write_output(rows: list[dict[str, str]], columns: tuple[str, ...], output: Path | None, stream: TextIO, *, trailer: str | None = None) -> None:
    if output is None:
        write_csv(rows, columns, stream, trailer=trailer)
        return
    output.parent.mkdir(parents=True, exist_ok=True)
    with output.open("w", newline="") as outfile:
        write_csv(rows, columns, outfile, trailer=trailer)
