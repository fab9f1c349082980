"""Spectrum CSV / JSON sidecar and generator-matrix file formats."""

from __future__ import annotations

import csv
import json
import logging
from pathlib import Path

import numpy as np
from pydantic import ValidationError

from ..errors import ParameterError, SpectrumLoadError
from .models import WeightSpectrum

logger = logging.getLogger(__name__)

SPECTRUM_HEADER = ("w", "count")


def sidecar_path(path: str | Path) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".json")


def load_spectrum(path: str | Path, *, n: int | None = None, k: int | None = None) -> WeightSpectrum:
    """Parse a ``w,count`` CSV; n and k come from arguments or the JSON sidecar."""

    path = Path(path)
    if not path.is_file():
        raise SpectrumLoadError(path, None, "spectrum file not found")

    metadata = _read_sidecar(path)
    n = n if n is not None else metadata.get("n")
    k = k if k is not None else metadata.get("k")

    rows: dict[int, int] = {}
    with path.open(newline="") as infile:
        reader = csv.reader(infile)
        for line_number, row in enumerate(reader, start=1):
            cells = [cell.strip() for cell in row]
            if not cells or not any(cells) or cells[0].startswith("#"):
                continue
            if line_number == 1 and tuple(cell.lower() for cell in cells) == SPECTRUM_HEADER:
                continue
            if len(cells) != 2:
                raise SpectrumLoadError(path, line_number, f"expected 2 columns, got {len(cells)}")
            try:
                weight, count = int(cells[0]), int(cells[1])
            except ValueError as exc:
                raise SpectrumLoadError(path, line_number, f"non-integer entry {cells!r}") from exc
            if weight < 0 or count < 0:
                raise SpectrumLoadError(path, line_number, "weights and counts must be non-negative")
            if weight in rows:
                raise SpectrumLoadError(path, line_number, f"duplicate weight {weight}")
            if n is not None and weight > n:
                raise SpectrumLoadError(path, line_number, f"weight {weight} exceeds block length {n}")
            if weight == 0 and count != 1:
                raise SpectrumLoadError(path, line_number, f"S_0 must be 1, got {count}")
            rows[weight] = count

    if 0 not in rows:
        raise SpectrumLoadError(path, None, "missing S_0 row")
    if n is None:
        n = max(rows)
        if n == 0:
            raise SpectrumLoadError(path, None, "block length unknown: only S_0 given and no n declared")

    counts = [rows.get(weight, 0) for weight in range(n + 1)]
    try:
        spectrum = WeightSpectrum.from_counts(counts, k=k, label=path.stem)
    except ValidationError as exc:
        raise SpectrumLoadError(path, None, exc.errors()[0]["msg"]) from exc

    declared = metadata.get("d_min")
    if declared is not None and declared != spectrum.d_min:
        logger.warning("%s declares d_min=%s but the spectrum gives %s; using %s", path, declared, spectrum.d_min, spectrum.d_min)
    return spectrum


def save_spectrum(spectrum: WeightSpectrum, path: str | Path) -> Path:
    """Write the exact spectrum as CSV plus a JSON sidecar with n, k and d_min."""

    if spectrum.exact_s is None:
        raise ParameterError("only exact integer spectra can be written as w,count files")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as outfile:
        writer = csv.writer(outfile, lineterminator="\n")
        writer.writerow(SPECTRUM_HEADER)
        for weight, count in enumerate(spectrum.exact_s):
            if count:
                writer.writerow((weight, count))
    metadata = {"n": spectrum.n, "k": spectrum.k, "d_min": spectrum.d_min}
    sidecar_path(path).write_text(json.dumps(metadata, indent=2) + "\n")
    return path


def load_generator(path: str | Path) -> np.ndarray:
    """Read 0/1 rows (optionally space separated, ``#`` comments allowed)."""

    path = Path(path)
    if not path.is_file():
        raise ParameterError(f"generator file not found: {path}")
    rows: list[list[int]] = []
    for line_number, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].replace(",", " ").strip()
        if not line:
            continue
        symbols = line.split() if " " in line else list(line)
        if any(symbol not in ("0", "1") for symbol in symbols):
            raise ParameterError(f"{path}:{line_number}: generator rows must contain only 0 and 1")
        rows.append([int(symbol) for symbol in symbols])
    if not rows:
        raise ParameterError(f"{path}: generator matrix has no rows")
    if len({len(row) for row in rows}) != 1:
        raise ParameterError(f"{path}: generator rows have different lengths")
    return np.asarray(rows, dtype=np.uint8)


def _read_sidecar(path: Path) -> dict:
    sidecar = sidecar_path(path)
    if not sidecar.is_file():
        return {}
    try:
        payload = json.loads(sidecar.read_text())
    except json.JSONDecodeError as exc:
        raise SpectrumLoadError(sidecar, exc.lineno, f"invalid JSON sidecar: {exc.msg}") from exc
    if not isinstance(payload, dict):
        raise SpectrumLoadError(sidecar, None, "sidecar must be a JSON object")
    return payload
