from __future__ import annotations

import csv
import io
import json
import tempfile
import unittest
from contextlib import redirect_stderr, redirect_stdout
from pathlib import Path

import numpy as np

from src.bms_bounds.main import EXIT_FAILURE, EXIT_INPUT_ERROR, EXIT_OK, main
from src.bms_bounds.spectrum import binomial_spectrum
from src.bms_bounds.spectrum.io import sidecar_path
from src.bms_bounds.sweep import SweepConfig, config_hash, run_sweep
from tests.fixtures import HAMMING_7_4, write_generator


def run_cli(*argv: str) -> tuple[int, str]:
    stdout = io.StringIO()
    with redirect_stdout(stdout), redirect_stderr(io.StringIO()):
        code = main(list(argv))
    return code, stdout.getvalue()


def csv_rows(text: str) -> list[dict[str, str]]:
    lines = [line for line in text.splitlines() if not line.startswith("#")]
    return list(csv.DictReader(lines))


class CliTests(unittest.TestCase):
    def setUp(self) -> None:
        self._tmp = tempfile.TemporaryDirectory()
        self.tmp = Path(self._tmp.name)
        self.generator = write_generator(self.tmp / "ham74.txt", HAMMING_7_4)

    def tearDown(self) -> None:
        self._tmp.cleanup()

    def test_spectrum_command_writes_files(self) -> None:
        output = self.tmp / "out" / "ham74.csv"
        code, _ = run_cli("spectrum", "--generator", str(self.generator), "--output", str(output))
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(output.read_text().splitlines(), ["w,count", "0,1", "3,7", "4,7", "7,1"])
        self.assertEqual(json.loads(sidecar_path(output).read_text())["d_min"], 3)

    def test_spectrum_command_rejects_bad_generators(self) -> None:
        empty = self.tmp / "empty.txt"
        empty.write_text("# no rows\n")
        deficient = write_generator(self.tmp / "deficient.txt", np.array([[1, 1, 0], [1, 1, 0]]))
        for path in (empty, deficient, self.tmp / "missing.txt"):
            code, _ = run_cli("spectrum", "--generator", str(path), "--output", str(self.tmp / "s.csv"))
            self.assertEqual(code, EXIT_INPUT_ERROR, path.name)

    def test_bound_command_emits_one_row_per_bound(self) -> None:
        code, text = run_cli(
            "bound", "--channel", "bsc-bec", "--eps", "0.01", "--delta", "0.1",
            "--generator", str(self.generator), "--bounds", "extended,sf",
        )
        self.assertEqual(code, EXIT_OK)
        rows = csv_rows(text)
        self.assertEqual([row["bound_name"] for row in rows], ["extended", "sf"])
        self.assertTrue(all(row["status"] == "ok" for row in rows))
        self.assertEqual(rows[0]["wall_ms"], "")
        self.assertEqual(rows[0]["gamma"], "")
        self.assertEqual(rows[0]["n"], "7")
        self.assertFalse(text.rstrip().splitlines()[-1].startswith("#"))

    def test_bound_command_without_spectrum_is_an_input_error(self) -> None:
        code, text = run_cli("bound", "--channel", "bsc", "--eps", "0.01")
        self.assertEqual(code, EXIT_INPUT_ERROR)
        self.assertEqual(text, "")
        code, _ = run_cli("bound", "--channel", "bsc", "--eps", "0.01", "--spectrum", str(self.tmp / "none.csv"))
        self.assertEqual(code, EXIT_INPUT_ERROR)

    def test_inapplicable_bound_gives_error_row(self) -> None:
        code, text = run_cli(
            "bound", "--channel", "bsc-bec", "--eps", "0.01", "--delta", "0.1",
            "--generator", str(self.generator), "--bounds", "poltyrev,extended",
        )
        self.assertEqual(code, EXIT_FAILURE)
        rows = csv_rows(text)
        self.assertEqual([row["status"] for row in rows], ["error", "ok"])
        self.assertIn("bsc", rows[0]["message"])

    def test_raw_channel_matches_named_family(self) -> None:
        code, raw = run_cli("bound", "--channel", "raw", "--p0", "0.9;0;0.1", "--generator", str(self.generator))
        self.assertEqual(code, EXIT_OK)
        _, named = run_cli("bound", "--channel", "bsc", "--eps", "0.1", "--generator", str(self.generator))
        self.assertEqual(csv_rows(raw)[0]["value"], csv_rows(named)[0]["value"])
        self.assertEqual(csv_rows(raw)[0]["family"], "raw")
        code, _ = run_cli("bound", "--channel", "raw", "--generator", str(self.generator))
        self.assertEqual(code, EXIT_INPUT_ERROR)

    def test_sweep_rows_and_trailer(self) -> None:
        args = (
            "sweep", "--channel", "bsc", "--sweep", "epsilon", "--start", "0.001", "--stop", "0.05",
            "--points", "5", "--generator", str(self.generator), "--bounds", "extended,poltyrev",
        )
        code, text = run_cli(*args)
        self.assertEqual(code, EXIT_OK)
        rows = csv_rows(text)
        self.assertEqual(len(rows), 10)
        self.assertEqual(rows[0]["epsilon"], "0.001")
        self.assertEqual(rows[-1]["epsilon"], "0.05")
        trailer = text.rstrip().splitlines()[-1]
        self.assertRegex(trailer, r"^# bms-bounds \S+ config-sha256=[0-9a-f]{64}$")
        for extended, poltyrev in zip(rows[::2], rows[1::2]):
            self.assertTrue(np.isclose(float(extended["value"]), float(poltyrev["value"]), rtol=1e-9))

    def test_sweep_output_is_independent_of_threads(self) -> None:
        args = (
            "sweep", "--channel", "bsc-bec", "--eps", "0.01", "--sweep", "delta", "--start", "0.0",
            "--stop", "0.3", "--points", "4", "--generator", str(self.generator), "--bounds", "extended,rect",
        )
        outputs = {}
        for threads in ("1", "4", "8"):
            code, outputs[threads] = run_cli("--threads", threads, *args)
            self.assertEqual(code, EXIT_OK, threads)
        single = outputs["1"]
        self.assertEqual(single, outputs["4"])
        self.assertEqual(single, outputs["8"])
        rows = csv_rows(single)
        self.assertEqual(len(rows), 8)
        for extended, rect in zip(rows[::2], rows[1::2]):
            self.assertLessEqual(float(extended["value"]), float(rect["value"]) * (1 + 1e-12))

    def test_binomial_sweep_is_byte_identical_across_threads(self) -> None:
        args = (
            "sweep", "--channel", "bsc-bec", "--delta", "0.1", "--sweep", "epsilon", "--start", "0.001",
            "--stop", "0.05", "--points", "4", "--binomial", "31", "16", "--bounds", "extended,sf",
            "--pruning-target", "1e-12",
        )
        outputs = [run_cli("--threads", threads, *args) for threads in ("1", "4", "8")]
        self.assertEqual([code for code, _ in outputs], [EXIT_OK] * 3)
        self.assertEqual(outputs[0][1], outputs[1][1])
        self.assertEqual(outputs[0][1], outputs[2][1])

    def test_engine_pools_run_inside_point_pools(self) -> None:
        spectrum = binomial_spectrum(7, 4)
        single = SweepConfig(channel={"family": "bsc", "epsilon": 0.05}, binomial=(7, 4), bounds=["extended", "rect"])
        for threads in (1, 4):
            rows = run_sweep(single, spectrum, threads=threads)
            self.assertEqual([row["status"] for row in rows], ["ok", "ok"])
        swept = single.model_copy(update={"sweep": "epsilon", "start": 0.01, "stop": 0.05, "points": 3})
        for threads in (1, 4):
            rows = run_sweep(swept, spectrum, threads=threads)
            self.assertEqual(len(rows), 6)
            self.assertTrue(all(row["status"] == "ok" for row in rows))

    def test_chernoff_rows_report_rectangle(self) -> None:
        code, text = run_cli(
            "bound", "--channel", "bsc-bec", "--eps", "0.01", "--delta", "0.05",
            "--generator", str(self.generator), "--bounds", "rect,chernoff", "--rect", "3;2", "--timing",
        )
        self.assertEqual(code, EXIT_OK)
        rows = csv_rows(text)
        self.assertEqual([row["rect_m"] for row in rows], ["3;2", "3;2"])
        self.assertNotEqual(rows[0]["wall_ms"], "")
        self.assertLessEqual(float(rows[0]["value"]), float(rows[1]["value"]) * (1 + 1e-12))

        code, text = run_cli("bound", "--channel", "bsc", "--eps", "0.02", "--generator", str(self.generator), "--bounds", "chernoff")
        self.assertEqual(code, EXIT_OK)
        self.assertRegex(csv_rows(text)[0]["rect_m"], r"^0;\d+$")

    def test_config_file_with_flag_override(self) -> None:
        config = self.tmp / "run.json"
        config.write_text(
            json.dumps(
                {
                    "channel": {"family": "bsc", "epsilon": 0.2},
                    "generator": str(self.generator),
                    "bounds": ["poltyrev"],
                }
            )
        )
        output = self.tmp / "rows.csv"
        code, text = run_cli("bound", "--config", str(config), "--eps", "0.02", "--output", str(output))
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(text, "")
        rows = csv_rows(output.read_text())
        self.assertEqual(rows[0]["epsilon"], "0.02")

        config.write_text(json.dumps({"channel": {"family": "bsc"}, "colour": "red"}))
        code, _ = run_cli("bound", "--config", str(config), "--generator", str(self.generator))
        self.assertEqual(code, EXIT_INPUT_ERROR)

    def test_verify_passes_on_hamming(self) -> None:
        code, text = run_cli(
            "verify", "--channel", "bsc-bec", "--eps", "0.0", "0.05", "--delta", "0.0", "0.1",
            "--generator", str(self.generator), "--bounds", "extended,bsc-bec",
        )
        self.assertEqual(code, EXIT_OK)
        rows = csv_rows(text)
        self.assertEqual(len(rows), 8)
        self.assertTrue(all(float(row["margin"]) >= -1e-12 for row in rows))

    def test_verify_flags_a_wrong_spectrum(self) -> None:
        # only the all-one word survives, so the bound undercounts the true error rate
        spectrum = self.tmp / "wrong.csv"
        spectrum.write_text("w,count\n0,1\n7,1\n")
        code, text = run_cli(
            "verify", "--channel", "bsc-bec", "--eps", "0.05", "--delta", "0.1",
            "--generator", str(self.generator), "--spectrum", str(spectrum),
        )
        self.assertEqual(code, EXIT_FAILURE)
        self.assertEqual(csv_rows(text)[0]["status"], "violation")

    def test_print_config_schema(self) -> None:
        code, text = run_cli("--print-config-schema")
        self.assertEqual(code, EXIT_OK)
        schema = json.loads(text)
        self.assertEqual(set(schema), {"sweep", "verify"})
        self.assertIn("pruning_target", schema["sweep"]["properties"])

    def test_config_hash_ignores_runtime_fields(self) -> None:
        base = SweepConfig(channel={"family": "bsc", "epsilon": 0.01}, binomial=(31, 16))
        same = base.model_copy(update={"threads": 8, "output": Path("elsewhere.csv"), "timing": True})
        other = SweepConfig(channel={"family": "bsc", "epsilon": 0.02}, binomial=(31, 16))
        self.assertEqual(config_hash(base), config_hash(same))
        self.assertNotEqual(config_hash(base), config_hash(other))

    def test_missing_command_and_bad_threads(self) -> None:
        self.assertEqual(run_cli()[0], EXIT_INPUT_ERROR)
        self.assertEqual(run_cli("--threads", "0", "spectrum", "--generator", "g", "--output", "o")[0], EXIT_INPUT_ERROR)


if __name__ == "__main__":
    unittest.main()
