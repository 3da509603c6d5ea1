#!/usr/bin/env python3
"""CLI for monitored-lattice trajectory and spectrum experiments"""

import argparse
import sys
from pathlib import Path
from typing import List, Optional

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.cli import COMMANDS, run, validate_command
from src.utils.logger import setup_logger


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qtraj",
        description="Quantum trajectories of a particle on a monitored tight-binding chain",
    )
    subparsers = parser.add_subparsers(dest="subcommand", required=True)

    for name, command in COMMANDS.items():
        sub = subparsers.add_parser(name, help=command.description)
        sub.add_argument("--config", required=True, help="Path to the YAML experiment config")
        sub.add_argument("--out", default=None, help="Output directory (default: QTRAJ_OUTPUT_DIR or ./output)")
        sub.add_argument("--threads", type=int, default=None, help="Worker processes for ensembles")
        sub.add_argument("--seed", type=int, default=None, help="Override integration.seed")

    sub = subparsers.add_parser("validate", help="Check a config and print it with defaults filled in")
    sub.add_argument("--config", required=True, help="Path to the YAML experiment config")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Main CLI entry point"""
    args = build_parser().parse_args(argv)
    setup_logger("qtraj")
    if args.subcommand == "validate":
        return validate_command(args.config)
    return run(args.subcommand, args.config, out_dir=args.out, threads=args.threads, seed=args.seed)


if __name__ == "__main__":
    sys.exit(main())
