"""CLI entrypoint for bound evaluation, sweeps, spectrum files and oracle checks."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any

from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table

from . import __version__
from .config import EngineConfig, THREADS_ENV_VAR, default_thread_count
from .errors import BoundsError
from .spectrum import brute_force_spectrum, load_generator, save_spectrum
from .sweep import (
    BOUND_COLUMNS,
    BOUND_NAMES,
    VERIFY_COLUMNS,
    SweepConfig,
    VerifyConfig,
    config_schema,
    load_config,
    resolve_spectrum,
    run_sweep,
    verify_rows,
    write_output,
)

console = Console(stderr=True)
logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_INPUT_ERROR = 2


def _probability_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(part) for part in text.replace(",", ";").split(";") if part.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected numbers separated by ';', got {text!r}") from exc


def _add_channel_arguments(parser: argparse.ArgumentParser, *, multi: bool) -> None:
    nargs = "+" if multi else None
    parser.add_argument("--channel", choices=("bsc", "bec", "bsc-bec", "quinary", "raw"), help="Channel family.")
    parser.add_argument("--eps", type=float, nargs=nargs, help="Crossover (weak-error) probability.")
    parser.add_argument("--delta", type=float, nargs=nargs, help="Erasure probability.")
    parser.add_argument("--gamma", type=float, nargs=nargs, help="Weak-correct probability (quinary).")
    parser.add_argument("--p0", type=_probability_list, help="P(y|0) for symbols -M..M separated by ';' (raw family).")


def _add_spectrum_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--spectrum", type=Path, help="w,count CSV file (n and k from its JSON sidecar).")
    parser.add_argument("--generator", type=Path, help="Generator matrix file; spectrum by enumeration.")
    parser.add_argument("--binomial", type=int, nargs=2, metavar=("N", "K"), help="Random-linear-code ensemble spectrum.")
    parser.add_argument("--n", type=int, help="Block length when the spectrum file has no sidecar.")
    parser.add_argument("--k", type=int, help="Code dimension when the spectrum file has no sidecar.")


def _add_bound_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, help="JSON run configuration; flags override it.")
    _add_channel_arguments(parser, multi=False)
    _add_spectrum_arguments(parser)
    parser.add_argument("--bounds", help=f"Comma-separated bound names from {', '.join(BOUND_NAMES)}.")
    parser.add_argument("--rect", help="Rectangle caps m_j for symbols -M+1..M, separated by ';'.")
    parser.add_argument("--sigma-count", type=float, help="Default rectangle width in standard deviations.")
    parser.add_argument("--pruning-target", type=float, help="Target FER enabling type pruning.")
    parser.add_argument("--output", type=Path, help="CSV destination (stdout when omitted).")
    parser.add_argument("--timing", action="store_true", default=None, help="Fill the wall_ms column.")


def build_parser() -> argparse.ArgumentParser:
    """Build command line interface parser."""
    parser = argparse.ArgumentParser(
        prog="bms-bounds",
        description="Upper bounds on the ML frame error rate of binary linear codes over discrete BMS channels.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--verbose", action="store_true", help="Debug logging to stderr.")
    parser.add_argument(
        "--threads",
        type=int,
        default=None,
        help=f"Worker threads (default: ${THREADS_ENV_VAR} or the CPU count).",
    )
    parser.add_argument(
        "--print-config-schema",
        action="store_true",
        help="Print the JSON schema of the run configuration files and exit.",
    )
    commands = parser.add_subparsers(dest="command")

    bound = commands.add_parser("bound", help="Evaluate bounds at one channel point.")
    _add_bound_arguments(bound)

    sweep = commands.add_parser("sweep", help="Evaluate bounds over a one-parameter grid.")
    _add_bound_arguments(sweep)
    sweep.add_argument("--sweep", dest="sweep_parameter", choices=("epsilon", "delta", "gamma"), help="Swept parameter.")
    sweep.add_argument("--start", type=float, help="First grid value.")
    sweep.add_argument("--stop", type=float, help="Last grid value.")
    sweep.add_argument("--points", type=int, help="Number of grid points.")
    sweep.add_argument("--spacing", choices=("auto", "linear", "log"), help="Grid spacing.")

    spectrum = commands.add_parser("spectrum", help="Write the weight spectrum of a generator matrix.")
    spectrum.add_argument("--generator", type=Path, required=True, help="Generator matrix file.")
    spectrum.add_argument("--output", type=Path, required=True, help="Destination w,count CSV.")

    verify = commands.add_parser("verify", help="Compare bounds with the ML oracle on small codes.")
    verify.add_argument("--config", type=Path, help="JSON verify configuration; flags override it.")
    _add_channel_arguments(verify, multi=True)
    _add_spectrum_arguments(verify)
    verify.add_argument("--bounds", help="Comma-separated bound names.")
    verify.add_argument("--oracle", choices=("exact", "simulate", "both"), help="Ground truth source.")
    verify.add_argument("--trials", type=int, help="Monte-Carlo trials per point.")
    verify.add_argument("--seed", type=int, help="Monte-Carlo seed.")
    verify.add_argument("--rect", help="Rectangle caps for rect/chernoff.")
    verify.add_argument("--sigma-count", type=float, help="Default rectangle width in standard deviations.")
    verify.add_argument("--output", type=Path, help="CSV destination (stdout when omitted).")
    return parser


def configure_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(message)s",
        handlers=[RichHandler(console=console, show_path=False)],
        force=True,
    )


def _drop_none(values: dict[str, Any]) -> dict[str, Any]:
    return {key: value for key, value in values.items() if value is not None}


def _common_overrides(args: argparse.Namespace) -> dict[str, Any]:
    overrides = {
        "spectrum": args.spectrum,
        "generator": args.generator,
        "binomial": args.binomial,
        "n": args.n,
        "k": args.k,
        "bounds": args.bounds.split(",") if args.bounds else None,
        "rect": args.rect,
        "sigma_count": args.sigma_count,
        "output": args.output,
        "threads": args.threads,
    }
    return _drop_none(overrides)


def sweep_overrides(args: argparse.Namespace) -> dict[str, Any]:
    overrides = _common_overrides(args)
    channel = _drop_none(
        {"family": args.channel, "epsilon": args.eps, "delta": args.delta, "gamma": args.gamma, "p0": args.p0}
    )
    if channel:
        overrides["channel"] = channel
    overrides.update(_drop_none({"pruning_target": args.pruning_target, "timing": args.timing}))
    if getattr(args, "sweep_parameter", None) is not None:
        overrides["sweep"] = args.sweep_parameter
    overrides.update(
        _drop_none(
            {
                "start": getattr(args, "start", None),
                "stop": getattr(args, "stop", None),
                "points": getattr(args, "points", None),
                "spacing": getattr(args, "spacing", None),
            }
        )
    )
    return overrides


def verify_overrides(args: argparse.Namespace) -> dict[str, Any]:
    overrides = _common_overrides(args)
    overrides.update(
        _drop_none(
            {
                "family": args.channel,
                "epsilon": args.eps,
                "delta": args.delta,
                "gamma": args.gamma,
                "p0": args.p0,
                "oracle": args.oracle,
                "trials": args.trials,
                "seed": args.seed,
            }
        )
    )
    return overrides


def show_run_summary(title: str, config: SweepConfig | VerifyConfig, threads: int) -> None:
    table = Table(title=title)
    table.add_column("Setting", style="cyan")
    table.add_column("Value", style="green")
    for key, value in config.model_dump(mode="json", exclude_none=True).items():
        table.add_row(key, json.dumps(value) if isinstance(value, (dict, list)) else str(value))
    table.add_row("worker threads", str(threads))
    console.print(table)


def cmd_bound(args: argparse.Namespace, *, sweep: bool = False) -> int:
    config = load_config(SweepConfig, args.config, sweep_overrides(args))
    if not sweep and config.sweep is not None:
        config = config.model_copy(update={"sweep": None})
    threads = args.threads or config.threads or default_thread_count()
    spectrum, _ = resolve_spectrum(config, max_dimension=EngineConfig().brute_force_max_dimension)
    show_run_summary("Sweep" if sweep else "Bound", config, threads)

    rows = run_sweep(config, spectrum, threads=threads)
    trailer = f"bms-bounds {__version__} config-sha256={config.semantic_hash()}" if sweep else None
    write_output(rows, BOUND_COLUMNS, config.output, sys.stdout, trailer=trailer)
    failures = sum(row["status"] != "ok" for row in rows)
    if failures:
        logger.error("%d of %d rows failed", failures, len(rows))
        return EXIT_FAILURE
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    return cmd_bound(args, sweep=True)


def cmd_spectrum(args: argparse.Namespace) -> int:
    generator = load_generator(args.generator)
    spectrum, _ = brute_force_spectrum(generator, label=args.generator.stem)
    path = save_spectrum(spectrum, args.output)
    table = Table(title=f"Spectrum of {args.generator.name}")
    table.add_column("w", style="cyan")
    table.add_column("S_w", style="green")
    for weight, count in enumerate(spectrum.exact_s or ()):
        if count:
            table.add_row(str(weight), str(count))
    console.print(table)
    console.log(f"wrote {path} (n={spectrum.n}, k={spectrum.k}, d_min={spectrum.d_min})")
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    config = load_config(VerifyConfig, args.config, verify_overrides(args))
    threads = args.threads or config.threads or default_thread_count()
    engine = EngineConfig()
    spectrum, codebook = resolve_spectrum(config, max_dimension=engine.brute_force_max_dimension)
    assert codebook is not None
    show_run_summary("Verify", config, threads)

    rows = verify_rows(config, spectrum, codebook, engine=engine, threads=threads)
    write_output(rows, VERIFY_COLUMNS, config.output, sys.stdout)
    show_verify_report(rows)
    if any(row["status"] != "ok" for row in rows):
        return EXIT_FAILURE
    return EXIT_OK


def show_verify_report(rows: list[dict[str, str]]) -> None:
    columns = ("bound_name", "epsilon", "delta", "gamma", "value", "exact", "simulated_fer", "margin", "status")
    table = Table(title="Soundness margins")
    for column in columns:
        table.add_column(column)
    for row in rows:
        style = "green" if row["status"] == "ok" else "red"
        table.add_row(*(row[column] for column in columns), style=style)
    console.print(table)


COMMANDS = {"bound": cmd_bound, "sweep": cmd_sweep, "spectrum": cmd_spectrum, "verify": cmd_verify}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.verbose)

    if args.print_config_schema:
        print(json.dumps(config_schema(), indent=2))
        return EXIT_OK
    if args.command is None:
        parser.print_help(sys.stderr)
        return EXIT_INPUT_ERROR
    if args.threads is not None and args.threads < 1:
        console.print("[red]error:[/red] --threads must be at least 1")
        return EXIT_INPUT_ERROR

    try:
        return COMMANDS[args.command](args)
    except (BoundsError, OSError) as exc:
        console.print(f"[red]error:[/red] {exc}")
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
