#!/usr/bin/env python3
"""
cordic-kit - command-line entry point

Commands: compute, compare, dct-table, image, lob-trace.
Engine parameters come from flags, then an optional cordic.env file, then defaults.
Exit codes: 0 success, 1 usage, 2 budget exhausted, 3 I/O or PGM error.
"""

import argparse
import logging
import os
import sys
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

from dotenv import dotenv_values

from bench import (
    EXIT_IO,
    EXIT_USAGE,
    all_variant_names,
    cmd_compare,
    cmd_compute,
    cmd_dct_table,
    cmd_image,
    cmd_lob_trace,
    parse_sweep,
)
from cordic_core import DEFAULT_EPSILON_ULPS, DEFAULT_ITERATIONS, EngineConfig
from errors import CordicError, PgmFormatError, UsageError
from fixnum import QFormat
from variants import get_variant

logger = logging.getLogger(__name__)

DEFAULT_CONFIG_FILE = "cordic.env"
DEFAULT_FORMAT = "q2.14"
DEFAULT_SWEEP = "-90:90:256"
CONFIG_KEYS = {
    "CORDIC_FORMAT",
    "CORDIC_ITERATIONS",
    "CORDIC_EPSILON_ULPS",
    "CORDIC_VARIANTS",
    "CORDIC_SCALE_CORRECTION",
    "CORDIC_LOG_LEVEL",
}
_TRUE = {"1", "on", "true", "yes"}
_FALSE = {"0", "off", "false", "no"}


class CliParser(argparse.ArgumentParser):
    """argparse exits with 2 on bad usage; cordic-kit reserves 2 for budget exhaustion."""

    def error(self, message):
        raise UsageError(message)


@dataclass
class Settings:
    config: EngineConfig
    variants: List[str]
    log_level: str


def load_config_file(path: Optional[str]) -> Dict[str, str]:
    """Values from a dotenv file; the default file is optional, an explicit --config is not."""
    if path is None:
        if not os.path.exists(DEFAULT_CONFIG_FILE):
            return {}
        path = DEFAULT_CONFIG_FILE
    elif not os.path.exists(path):
        raise FileNotFoundError(f"config file not found: {path}")
    values = {k: v for k, v in dotenv_values(path, interpolate=False).items() if v is not None}
    for key in sorted(set(values) - CONFIG_KEYS):
        logger.warning(f"Ignoring unknown config key {key} in {path}")
    return {k: v for k, v in values.items() if k in CONFIG_KEYS}


def _int_setting(name: str, flag_value: Optional[int], file_value: Optional[str], default: int) -> int:
    if flag_value is not None:
        return flag_value
    if file_value is None:
        return default
    try:
        return int(file_value)
    except ValueError:
        raise UsageError(f"{name} must be an integer, got '{file_value}'")


def _bool_setting(name: str, file_value: Optional[str], default: bool) -> bool:
    if file_value is None:
        return default
    lowered = file_value.strip().lower()
    if lowered in _TRUE:
        return True
    if lowered in _FALSE:
        return False
    raise UsageError(f"{name} must be on or off, got '{file_value}'")


def resolve_settings(args: argparse.Namespace, file_values: Dict[str, str]) -> Settings:
    """Flags override file values, which override built-in defaults."""
    fmt = QFormat.parse(args.format or file_values.get("CORDIC_FORMAT") or DEFAULT_FORMAT)
    iterations = _int_setting("CORDIC_ITERATIONS", args.iterations, file_values.get("CORDIC_ITERATIONS"),
                              min(DEFAULT_ITERATIONS, fmt.total_bits))
    epsilon = _int_setting("CORDIC_EPSILON_ULPS", args.epsilon_ulps, file_values.get("CORDIC_EPSILON_ULPS"),
                           DEFAULT_EPSILON_ULPS)
    if args.no_scale_correction:
        scale_correction = False
    else:
        scale_correction = _bool_setting("CORDIC_SCALE_CORRECTION", file_values.get("CORDIC_SCALE_CORRECTION"), True)

    if args.variant:
        variants = list(args.variant)
    elif file_values.get("CORDIC_VARIANTS"):
        variants = [v.strip() for v in file_values["CORDIC_VARIANTS"].split(",") if v.strip()]
    else:
        variants = all_variant_names()
    for name in variants:
        get_variant(name)

    log_level = (args.log_level or file_values.get("CORDIC_LOG_LEVEL") or "INFO").upper()
    if not isinstance(logging.getLevelName(log_level), int):
        raise UsageError(f"Unknown log level '{log_level}'")

    config = EngineConfig(
        fmt=fmt,
        max_iterations=iterations,
        z_epsilon_ulps=epsilon,
        y_epsilon_ulps=epsilon,
        scale_correction=scale_correction,
    )
    return Settings(config=config, variants=variants, log_level=log_level)


def build_parser() -> CliParser:
    common = CliParser(add_help=False)
    common.add_argument("--variant", action="append", help="variant name (repeatable)")
    common.add_argument("--format", help="Q-format such as q2.14 (integer bits include the sign)")
    common.add_argument("--iterations", type=int, help="iteration budget")
    common.add_argument("--epsilon-ulps", type=int, help="convergence threshold in ulps")
    common.add_argument("--no-scale-correction", action="store_true", help="skip the final k multiply")
    common.add_argument("--out", help="write data to this file instead of stdout")
    common.add_argument("--csv", action="store_true", help="CSV instead of a markdown table")
    common.add_argument("--config", help=f"dotenv config file (default: ./{DEFAULT_CONFIG_FILE} if present)")
    common.add_argument("--log-level", help="DEBUG, INFO, WARNING or ERROR")

    parser = CliParser(prog="cordic-kit", description="Fixed-point CORDIC variants, functions and DCT benchmarks")
    commands = parser.add_subparsers(dest="command", metavar="command")
    commands.required = True

    compute = commands.add_parser("compute", parents=[common], help="evaluate one function")
    compute.add_argument("function", help="sin-cos, tan, polar-to-rect, sinh-cosh, tanh, exp, atan, "
                                          "rect-to-polar, divide, ln, sqrt or ln-sqrt")
    compute.add_argument("args", nargs="*", type=float, help="arguments (angles in degrees)")

    compare = commands.add_parser("compare", parents=[common], help="cos/sin error and op counts over a sweep")
    compare.add_argument("--sweep", default=None, help=f"START:STOP:COUNT in degrees (default {DEFAULT_SWEEP})")
    compare.add_argument("--angles", default=None, help="comma-separated angles in degrees")

    table = commands.add_parser("dct-table", parents=[common], help="percent error of DCT coefficients a..g")
    table.add_argument("--quantized", action="store_true", help="errors after output quantization")

    image = commands.add_parser("image", parents=[common], help="blockwise DCT round trip with MSE/PSNR")
    image.add_argument("input", help="P5 PGM image")
    image.add_argument("--out-dir", help="directory for reconstructed images (default: next to the input)")
    image.add_argument("--approximate-inverse", action="store_true", help="use the variant matrix for the inverse")

    trace = commands.add_parser("lob-trace", parents=[common], help="leading-one detector stages for an angle")
    trace.add_argument("value", help="angle in degrees or a 16-bit word such as 0x78A3")
    return parser


def _angles(args: argparse.Namespace) -> List[float]:
    if args.angles:
        try:
            return [float(a) for a in args.angles.split(",") if a.strip()]
        except ValueError:
            raise UsageError(f"Cannot parse angle list '{args.angles}'")
    return parse_sweep(args.sweep or DEFAULT_SWEEP)


def dispatch(args: argparse.Namespace, settings: Settings) -> int:
    config = settings.config
    if args.command == "compute":
        if args.variant and len(args.variant) > 1:
            raise UsageError("compute takes a single --variant")
        variant = args.variant[0] if args.variant else "conventional"
        return cmd_compute(args.function, args.args, variant, config, as_csv=args.csv, out=args.out)
    if args.command == "compare":
        return cmd_compare(_angles(args), settings.variants, config, out=args.out)
    if args.command == "dct-table":
        return cmd_dct_table(settings.variants, config, quantized=args.quantized, as_csv=args.csv, out=args.out)
    if args.command == "image":
        return cmd_image(args.input, settings.variants, config, out_dir=args.out_dir,
                         approximate_inverse=args.approximate_inverse, out=args.out)
    return cmd_lob_trace(args.value, as_csv=args.csv, out=args.out)


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        file_values = load_config_file(args.config)
        settings = resolve_settings(args, file_values)
        logging.basicConfig(
            level=getattr(logging, settings.log_level),
            format="%(asctime)s - %(levelname)s - %(message)s"
        )
        logger.info(f"cordic-kit {args.command}: {settings.config.snapshot()}")
        return dispatch(args, settings)
    except PgmFormatError as e:
        logger.error(f"Image error: {e}")
        return EXIT_IO
    except CordicError as e:
        logger.error(f"Usage error: {e}")
        return EXIT_USAGE
    except OSError as e:
        logger.error(f"I/O error: {e}")
        return EXIT_IO
    except Exception as e:
        logger.error(f"cordic-kit failed: {e}")
        raise


if __name__ == "__main__":
    sys.exit(main())
