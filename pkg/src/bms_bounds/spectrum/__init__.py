"""Weight spectra, codebooks and their file formats."""

from .generate import binomial_spectrum, brute_force_spectrum, gf2_rank, spectrum_from_codebook, validate_generator
from .io import load_generator, load_spectrum, save_spectrum
from .models import Codebook, WeightSpectrum

__all__ = [
    "Codebook",
    "WeightSpectrum",
    "binomial_spectrum",
    "brute_force_spectrum",
    "gf2_rank",
    "load_generator",
    "load_spectrum",
    "save_spectrum",
    "spectrum_from_codebook",
    "validate_generator",
]
