#!/usr/bin/env python3
"""
Frame Density Toolkit

Batch driver for density, localization and restricted invertibility
experiments on frames and Gabor systems:
- Indexed and index-free densities
- Localization envelopes and summability verdicts
- Certified subset selection, finite and blockwise
- Gabor selection on the half-lattice

Usage:
    python main.py --config runs/select.json        # Run one experiment
    python main.py --emit-fixtures fixtures_out     # Write the bundled fixtures
    python main.py --list-commands                  # Show commands and fixtures

Exit status: 0 all clauses pass, 1 a clause failed, 2 configuration or
input error, 3 infeasible parameters or selection.
"""
import sys
import argparse
import logging
from pathlib import Path

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent))

from rich.console import Console
from rich.table import Table

from errors import (
    ConfigError,
    FrameToolkitError,
    InfeasibleParametersError,
    SelectionInfeasibleError,
)
from experiments.report import render_summary
from experiments.runner import get_registry, run
from experiments.schema import SEED_LIMIT, load_config
from fixtures.catalog import emit_fixtures
from logging_setup import configure_logging

logger = logging.getLogger("main")

EXIT_PASS = 0
EXIT_CLAUSE_FAILED = 1
EXIT_INPUT_ERROR = 2
EXIT_INFEASIBLE = 3


def seed_arg(value: str) -> int:
    seed = int(value)
    if not 0 <= seed < SEED_LIMIT:
        raise argparse.ArgumentTypeError(f"seed must be an unsigned 64-bit integer, got {value}")
    return seed


def print_commands(console: Console):
    table = Table(title="Commands")
    table.add_column("Command", style="cyan")
    table.add_column("Description")
    table.add_column("Fixtures")
    table.add_column("Inputs")
    for status in get_registry().list_commands():
        table.add_row(status["name"], status["description"], ", ".join(status["fixtures"]), ", ".join(status["inputs"]))
    console.print(table)


def run_config(args: argparse.Namespace, console: Console) -> int:
    overrides = {"seed": args.seed, "output_dir": args.out}
    try:
        config = load_config(args.config, overrides)
        report = run(config)
    except ConfigError as e:
        where = f" [{e.path}]" if e.path else ""
        logger.error("configuration error%s: %s", where, e)
        return EXIT_INPUT_ERROR
    except InfeasibleParametersError as e:
        logger.error("infeasible parameters (binding constraint: %s): %s", e.constraint or "unknown", e)
        return EXIT_INFEASIBLE
    except SelectionInfeasibleError as e:
        logger.error("selection infeasible (best |J| = %d, certificate %.4g): %s",
                     len(e.best_subset), e.certificate, e)
        return EXIT_INFEASIBLE
    except (FrameToolkitError, OSError, ValueError) as e:
        logger.error("input error: %s", e)
        return EXIT_INPUT_ERROR

    render_summary(report, console)
    return EXIT_PASS if report.passed else EXIT_CLAUSE_FAILED


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        description="Frame Density Toolkit",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  python main.py --config experiments/select.json           # Run a config
  python main.py --config gabor.json --out runs/gabor -v    # Override output dir, debug logging
  python main.py --config random.json --seed 17             # Override the seed
  python main.py --emit-fixtures fixtures_out               # Write every bundled fixture
        """
    )

    parser.add_argument(
        '--config',
        type=str,
        help='Experiment config (JSON)'
    )

    parser.add_argument(
        '--out',
        type=str,
        default=None,
        help='Output directory (overrides output_dir in the config)'
    )

    parser.add_argument(
        '--seed',
        type=seed_arg,
        default=None,
        help='Random seed, unsigned 64-bit (overrides the config)'
    )

    parser.add_argument(
        '-v', '--verbose',
        action='store_true',
        help='Debug logging'
    )

    parser.add_argument(
        '--emit-fixtures',
        type=str,
        metavar='DIR',
        help='Write the bundled fixtures to DIR and exit'
    )

    parser.add_argument(
        '--list-commands',
        action='store_true',
        help='List commands, their fixtures and input keys'
    )

    args = parser.parse_args(argv)
    configure_logging(args.verbose)
    console = Console()

    if args.list_commands:
        print_commands(console)
        return EXIT_PASS

    if args.emit_fixtures:
        try:
            written = emit_fixtures(args.emit_fixtures)
        except OSError as e:
            logger.error("cannot write fixtures: %s", e)
            return EXIT_INPUT_ERROR
        for path in written:
            console.print(str(path))
        return EXIT_PASS

    if not args.config:
        parser.print_help()
        return EXIT_INPUT_ERROR

    return run_config(args, console)


if __name__ == "__main__":
    sys.exit(main())
