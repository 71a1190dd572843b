from __future__ import annotations

import logging
import sys
from argparse import ArgumentDefaultsHelpFormatter, ArgumentParser
from pathlib import Path
from typing import Sequence

from pydantic import ValidationError

from rfiforge import __version__
from rfiforge.cli.commands import COMMANDS, load_config
from rfiforge.exceptions import ConfigurationError, ModelValidationError, RfiForgeException

logger = logging.getLogger("rfiforge")

HELP = {
    "simulate": "Synthesize one realization and write its zero-lag and lagged SCMs",
    "gamma-study": "Accuracy of the interferer signature estimate over INR and N",
    "smear-study": "Eigenvalue spectra of a moving interferer's covariance over N",
    "compare": "Projection against lag subtraction over several seeds",
    "image": "Dirty maps of one realization before and after mitigation",
}


def build_parser() -> ArgumentParser:
    common = ArgumentParser(add_help=False, formatter_class=ArgumentDefaultsHelpFormatter)
    common.add_argument(
        "config", help="Path to a JSON run configuration, or preset:fig1 / preset:fig2"
    )
    common.add_argument(
        "-o", "--out-dir", type=Path, default=Path("out"), help="Output directory"
    )
    common.add_argument("--trials", type=int, help="Trials, or seeds for compare")
    common.add_argument("--seed", type=int, help="Base seed, overrides RFI_FORGE_SEED")
    common.add_argument("--tau", type=int, help="Lag of the lagged covariance")
    common.add_argument("--delta", type=float, help="Gain error half-width")
    common.add_argument("--workers", type=int, help="Worker threads")
    common.add_argument(
        "--snapshots", action="store_true", help="Also write the snapshots (simulate)"
    )
    common.add_argument("-v", "--verbose", action="store_true", help="Be verbose")

    parser = ArgumentParser(
        prog="rfiforge",
        description="Spatial RFI mitigation simulator",
        formatter_class=ArgumentDefaultsHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True, metavar="command")
    for name, help_text in HELP.items():
        subparsers.add_parser(
            name, parents=[common], help=help_text, formatter_class=ArgumentDefaultsHelpFormatter
        )
    return parser


def _describe(error: RfiForgeException) -> str:
    if isinstance(error, ConfigurationError):
        where = []
        if error.field:
            where.append(f"field {error.field}")
        if error.line:
            where.append(f"line {error.line}")
        if where:
            return f"configuration error ({', '.join(where)}): {error}"
        return f"configuration error: {error}"
    return f"{type(error).__name__}: {error}"


def main(argv: Sequence[str] | None = None) -> int:
    """
    Run the command line front end.

    Returns
    -------
    int
        0 on success, 2 for configuration errors, 3 for I/O errors and 4 for numerical failures
    """
    args = build_parser().parse_args(argv)
    if args.verbose:
        logging.basicConfig(level=logging.DEBUG)
    else:
        logging.basicConfig(level=logging.INFO)

    try:
        if args.trials is not None and args.trials < 1:
            raise ConfigurationError("--trials must be at least 1", field="trials")
        if args.tau is not None and args.tau < 0:
            raise ConfigurationError("--tau must be non-negative", field="tau")
        config = load_config(args.config)
        try:
            manifest = COMMANDS[args.command](config, args)
        except ValidationError as e:
            raise ModelValidationError(e.errors()) from e
    except RfiForgeException as e:
        logger.error(_describe(e))
        return e.exit_code

    logger.info("Done, manifest at %s", manifest)
    return 0


if __name__ == "__main__":
    sys.exit(main())
