# Copyright (c) 2025 Stratoware LLC
# Licensed under the MIT License. See LICENSE file in the project root.

"""Main entry point for the tropwitt command line."""

import argparse
import sys
from typing import List, Optional

from app import configure_logging
from app.commands import EXIT_INVALID, CommandConfig, run
from app.errors import InvalidInputError
from app.settings import load_settings
from app.verify import SUITES


def _add_polygon_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--polygon",
        type=str,
        help="Polygon preset degree:d or rect:a,b, or a vertex list (default: degree:3)",
    )
    parser.add_argument("--vertices", type=str, help='Polygon vertices "x,y;x,y;..."')
    parser.add_argument("--genus", type=int, default=0, help="Genus (default: 0)")
    parser.add_argument(
        "--orientation",
        choices=("xy", "yx"),
        default="xy",
        help="Lattice path order: xy for x - eps*y, yx for y - eps*x (default: xy)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tropwitt",
        description="tropwitt - quadratically enriched tropical curve counts",
    )
    parser.add_argument("--json", dest="json_output", action="store_true", help="Print the machine-readable schema")
    parser.add_argument("--output", type=str, help="Also save the report (JSON, or YAML for .yaml)")
    parser.add_argument("--svg", type=str, help="Write an SVG figure to this path")
    parser.add_argument("--threads", type=int, help="Worker threads (default: TROPWITT_THREADS or 1)")
    parser.add_argument("--config", type=str, help="YAML settings file (default: TROPWITT_CONFIG)")
    parser.add_argument("--log-level", type=str, help="Logging level (default: WARNING)")
    subparsers = parser.add_subparsers(dest="subcommand", required=True)

    invariants = subparsers.add_parser("invariants", help="N, W and the enriched count")
    _add_polygon_arguments(invariants)
    invariants.add_argument("--table", action="store_true", help="Print the per-curve table")

    curves = subparsers.add_parser("curves", help="List the enumerated marked curves")
    _add_polygon_arguments(curves)
    curves.add_argument("--index", type=int, default=0, help="Curve drawn by --svg (default: 0)")

    verify = subparsers.add_parser("verify", help="Run numerical verification suites")
    verify.add_argument("suite", choices=SUITES + ("all",))
    verify.add_argument("--m-max", type=int, help="Largest degree m")
    verify.add_argument("--max-double-area", type=int, help="Largest triangle double area")
    verify.add_argument("--max-det", type=int, help="Largest |ad - bc| for parallelograms")
    verify.add_argument("--precision-digits", type=int, help="mpmath decimal digits (default: 40)")
    verify.add_argument("--tolerance-identity", type=float, help="Identity tolerance (default: 1e-9)")
    verify.add_argument("--tolerance-product", type=float, help="Product tolerance (default: 1e-6)")
    verify.add_argument("--tolerance-hessian", type=float, help="Hessian tolerance (default: 1e-6)")

    tropicalize = subparsers.add_parser("tropicalize", help="Curve and subdivision of a polynomial")
    tropicalize.add_argument("input", nargs="?", help="Polynomial file with 'i j height' lines")
    tropicalize.add_argument("--terms", type=str, help='Inline terms, e.g. "0 0 1 / 1 0 2 / 0 1 -1"')

    tower = subparsers.add_parser("tower", help="Extension tower of one marked curve")
    _add_polygon_arguments(tower)
    tower.add_argument("--curve-file", type=str, help="Curve or report file instead of enumerating")
    tower.add_argument("--index", type=int, default=0, help="Which curve (default: 0)")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point with command line argument support."""
    args = build_parser().parse_args(argv)
    values = {k: v for k, v in vars(args).items() if v is not None}
    try:
        config = CommandConfig.build(**values)
        configure_logging(load_settings(config.config, log_level=config.log_level).log_level)
    except (InvalidInputError, FileNotFoundError) as e:
        print(f"error: {e}")
        return EXIT_INVALID
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
