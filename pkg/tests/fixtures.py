from __future__ import annotations

from pathlib import Path

import numpy as np

from src.bms_bounds.spectrum import WeightSpectrum, brute_force_spectrum

REPETITION_3 = np.array([[1, 1, 1]], dtype=np.uint8)
REPETITION_7 = np.ones((1, 7), dtype=np.uint8)
SPC_4_3 = np.array(
    [
        [1, 0, 0, 1],
        [0, 1, 0, 1],
        [0, 0, 1, 1],
    ],
    dtype=np.uint8,
)
HAMMING_7_4 = np.array(
    [
        [1, 0, 0, 0, 1, 1, 0],
        [0, 1, 0, 0, 1, 0, 1],
        [0, 0, 1, 0, 0, 1, 1],
        [0, 0, 0, 1, 1, 1, 1],
    ],
    dtype=np.uint8,
)
# g(x) = 1 + x^4 + x^6 + x^7 + x^8, coefficients low to high
BCH_15_7_POLYNOMIAL = [1, 0, 0, 0, 1, 0, 1, 1, 1]


def bch_15_7() -> np.ndarray:
    rows = np.zeros((7, 15), dtype=np.uint8)
    for shift in range(7):
        rows[shift, shift : shift + len(BCH_15_7_POLYNOMIAL)] = BCH_15_7_POLYNOMIAL
    return rows


def spectrum_of(generator: np.ndarray, label: str = "code") -> WeightSpectrum:
    spectrum, _ = brute_force_spectrum(generator, label=label)
    return spectrum


def write_generator(path: Path, generator: np.ndarray) -> Path:
    path.write_text("\n".join("".join(str(int(bit)) for bit in row) for row in generator) + "\n")
    return path
