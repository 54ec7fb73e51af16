import argparse
import math
import sys

from dotenv import load_dotenv

from app.run import cmd_run
from app.sweep import cmd_sweep
from src.base import logger
from src.base.exceptions import DriftGasError
from src.model.baselines import BASELINES

LOGGER = logger.set()

METHODS = ("aigas", *BASELINES)


def positive_int(value: str) -> int:

    try:
        number = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got '{value}'")

    if number < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {number}")

    return number


def unsigned_int(value: str) -> int:

    try:
        number = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got '{value}'")

    if number < 0:
        raise argparse.ArgumentTypeError(f"expected an unsigned integer, got {number}")

    return number


def unit_fraction(value: str) -> float:

    number = float(value)

    if not 0 < number < 1:
        raise argparse.ArgumentTypeError(f"expected a fraction in (0, 1), got {number}")

    return number


def overlap_fraction(value: str) -> float:

    number = float(value)

    if not 0 <= number < 1:
        raise argparse.ArgumentTypeError(f"expected a fraction in [0, 1), got {number}")

    return number


def label_column(value: str):

    if value == "last":
        return value

    try:
        return int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'last' or an index, got '{value}'")


def window_size(value: str) -> float:

    if value.lower() in ("inf", "infinity"):
        return math.inf

    return float(positive_int(value))


def add_run_arguments(parser: argparse.ArgumentParser) -> None:
    """Flags shared by `run` and `sweep`; unset flags fall back to the run YAML."""

    parser.add_argument("--config", default="config/run.yaml", metavar="PATH")
    parser.add_argument("--labeled-frac", type=unit_fraction, metavar="F")
    parser.add_argument("--batches", type=positive_int, metavar="M")
    parser.add_argument("--g", type=positive_int, metavar="G")
    parser.add_argument("--k", type=positive_int, metavar="K")
    parser.add_argument("--kgng", type=positive_int, metavar="K")
    parser.add_argument("--passes", type=positive_int, metavar="P")
    parser.add_argument("--seed", type=unsigned_int, metavar="S")
    parser.add_argument("--sld-window", type=window_size, metavar="W|inf")
    parser.add_argument("--window-overlap", type=overlap_fraction, metavar="F")
    parser.add_argument("--label-col", type=label_column, default="last")
    parser.add_argument("--has-header", action="store_true")
    parser.add_argument("--out", metavar="DIR")
    parser.add_argument("--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:

    parser = argparse.ArgumentParser(
        prog="driftgas",
        description="Prototype tracking classifier for drifting streams "
        "under extreme verification latency",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="run one method on one stream")
    source = run.add_mutually_exclusive_group(required=True)
    source.add_argument("--dataset", metavar="PATH")
    source.add_argument("--synth", metavar="NAME")
    run.add_argument("--method", choices=METHODS, default="aigas")
    add_run_arguments(run)

    sweep = commands.add_parser("sweep", help="run every dataset x method pair")
    sweep.add_argument("--datasets", nargs="+", required=True, metavar="PATH|NAME")
    sweep.add_argument("--methods", nargs="+", choices=METHODS, default=list(METHODS))
    add_run_arguments(sweep)

    return parser


def main(argv=None) -> int:

    load_dotenv()

    args = build_parser().parse_args(argv)

    try:
        if args.command == "run":
            cmd_run(args)
            return 0

        table = cmd_sweep(args)
        return 0 if (table["status"] != "failed").all() else 1

    except (DriftGasError, ValueError, OSError) as err:
        LOGGER.error(f"{args.command} failed: {err}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
