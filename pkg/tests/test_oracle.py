from __future__ import annotations

import unittest

import numpy as np
from pydantic import ValidationError

from src.bms_bounds.bounds import extended_bound
from src.bms_bounds.channels import make_bec, make_bsc, make_bsc_bec, make_quinary
from src.bms_bounds.config import EngineConfig
from src.bms_bounds.errors import BudgetExceededError, ParameterError
from src.bms_bounds.oracle import SimResult, error_flags, exact_ml_error, ml_decode, simulate_fer
from src.bms_bounds.spectrum import Codebook
from tests.fixtures import HAMMING_7_4, REPETITION_3, REPETITION_7, spectrum_of

GRID = (0.0, 0.025, 0.05, 0.075, 0.1)


class OracleTests(unittest.TestCase):
    def setUp(self) -> None:
        self.rep3 = Codebook.from_generator(REPETITION_3)
        self.hamming = Codebook.from_generator(HAMMING_7_4)

    def test_repetition_exact_values(self) -> None:
        self.assertAlmostEqual(exact_ml_error(make_bsc(0.1), self.rep3), 0.028, delta=1e-12)
        for delta in (0.1, 0.5):
            self.assertAlmostEqual(exact_ml_error(make_bec(delta), self.rep3), delta**3, delta=1e-12)

    def test_noiseless_channel_never_fails(self) -> None:
        self.assertEqual(exact_ml_error(make_bsc(0.0), self.hamming), 0.0)
        self.assertEqual(exact_ml_error(make_bsc_bec(0.0, 0.0), self.hamming), 0.0)

    def test_extended_bound_is_sound_on_grid(self) -> None:
        for generator in (HAMMING_7_4, REPETITION_7):
            codebook = Codebook.from_generator(generator)
            spectrum = spectrum_of(generator)
            for epsilon in GRID:
                for delta in GRID:
                    channel = make_bsc_bec(epsilon, delta)
                    exact = exact_ml_error(channel, codebook)
                    bound = extended_bound(channel, spectrum).p_upper
                    self.assertGreaterEqual(bound - exact, -1e-12, (epsilon, delta))

    def test_transmitted_codeword_does_not_matter(self) -> None:
        channel = make_bsc_bec(0.05, 0.1)
        reference = exact_ml_error(channel, self.hamming)
        for index in (3, 9, 15):
            self.assertAlmostEqual(exact_ml_error(channel, self.hamming, transmitted=index), reference, delta=1e-12)

    def test_row_order_does_not_matter(self) -> None:
        channel = make_bsc_bec(0.03, 0.07)
        words = self.hamming.words.copy()
        shuffled = Codebook.from_words(words[np.random.default_rng(3).permutation(len(words))])
        self.assertAlmostEqual(exact_ml_error(channel, shuffled), exact_ml_error(channel, self.hamming), delta=1e-12)

    def test_enumeration_budget(self) -> None:
        with self.assertRaises(BudgetExceededError) as caught:
            exact_ml_error(make_bsc(0.1), self.hamming, config=EngineConfig(oracle_max_outputs=100))
        self.assertEqual(caught.exception.required, 3**7)
        with self.assertRaises(ParameterError):
            exact_ml_error(make_bsc(0.1), Codebook.from_words([[1, 1, 0], [0, 1, 1]]))

    def test_simulation_edge_channels(self) -> None:
        self.assertEqual(simulate_fer(make_bsc(0.0), self.hamming, 500, seed=1).fer, 0.0)
        erased = simulate_fer(make_bec(1.0), self.hamming, 500, seed=1)
        self.assertEqual(erased.fer, 1.0)
        self.assertEqual(erased.stderr, 0.0)

    def test_simulation_agrees_with_exact(self) -> None:
        channel = make_bsc_bec(0.05, 0.05)
        exact = exact_ml_error(channel, self.hamming)
        result = simulate_fer(channel, self.hamming, 100_000, seed=2024)
        self.assertEqual(result.trials, 100_000)
        self.assertLessEqual(abs(result.fer - exact), 4 * result.stderr)

    def test_simulation_agrees_with_exact_across_seeds(self) -> None:
        channel = make_bsc_bec(0.05, 0.05)
        exact = exact_ml_error(channel, self.hamming)
        within = 0
        for seed in range(100):
            result = simulate_fer(channel, self.hamming, 4000, seed=seed, workers=1)
            within += abs(result.fer - exact) <= 4 * result.stderr
        self.assertGreaterEqual(within, 99)

    def test_error_flags_agree_with_likelihood_decoding(self) -> None:
        self.assertFalse(np.any(self.hamming.words[0]))
        rng = np.random.default_rng(7)
        for channel in (make_bsc_bec(0.05, 0.1), make_bec(0.4), make_quinary(0.05, 0.1, 0.2)):
            positions = rng.choice(channel.alphabet_size, size=(300, 7), p=np.asarray(channel.p0))
            flags = error_flags(channel.llr_vector(), positions, self.hamming.nonzero_words)
            for received, flagged in zip(positions - channel.half_width, flags):
                decoded = ml_decode(channel, received, self.hamming)
                self.assertEqual(bool(flagged), decoded.index != 0 or decoded.tie, received)

    def test_simulation_is_reproducible_for_any_worker_count(self) -> None:
        channel = make_bsc_bec(0.05, 0.1)
        config = EngineConfig(simulation_block_trials=1000)
        first = simulate_fer(channel, self.hamming, 5500, seed=11, workers=1, config=config)
        second = simulate_fer(channel, self.hamming, 5500, seed=11, workers=3, config=config)
        self.assertEqual(first, second)

    def test_simulation_arguments(self) -> None:
        with self.assertRaises(ParameterError):
            simulate_fer(make_bsc(0.1), self.hamming, 0, seed=1)
        with self.assertRaises(ParameterError):
            simulate_fer(make_bsc(0.1), self.hamming, 10, seed=-1)
        with self.assertRaises(ValidationError):
            SimResult(trials=2, errors=3, fer=1.0, stderr=0.0, seed=0)

    def test_ml_decode(self) -> None:
        channel = make_bsc(0.1)
        decoded = ml_decode(channel, [-1, -1, -1], self.rep3)
        self.assertEqual((decoded.index, decoded.tie), (0, False))
        decoded = ml_decode(channel, [1, 1, -1], self.rep3)
        self.assertEqual((decoded.index, decoded.tie), (1, False))
        self.assertTrue(np.all(self.rep3.words[1] == 1))

    def test_ml_decode_noiseless_images_and_ties(self) -> None:
        channel = make_bsc_bec(0.05, 0.1)
        for index, word in enumerate(self.hamming.words):
            received = np.where(word == 1, 1, -1)
            decoded = ml_decode(channel, received, self.hamming)
            self.assertEqual((decoded.index, decoded.tie), (index, False))
        erased = ml_decode(make_bec(0.5), [0] * 7, self.hamming)
        self.assertEqual((erased.index, erased.tie), (0, True))
        with self.assertRaises(ParameterError):
            ml_decode(channel, [2] * 7, self.hamming)
        with self.assertRaises(ParameterError):
            ml_decode(channel, [0] * 6, self.hamming)


if __name__ == "__main__":
    unittest.main()
