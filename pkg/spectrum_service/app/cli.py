"""
gp-spectrum <spectrum|verify|simulate|sweep> --config <path> [options]
"""

import logging
import sys
from typing import List, Optional

import sentry_sdk
from django.core.management.base import CommandError

from . import config
from .commands import simulate, spectrum, sweep, verify
from .exceptions import SpectrumError

logger = logging.getLogger(__name__)

COMMANDS = {
    "spectrum": spectrum.Command,
    "verify": verify.Command,
    "simulate": simulate.Command,
    "sweep": sweep.Command,
}


def configure(verbose: bool = False) -> None:
    sentry_sdk.init(dsn=config.SENTRY_KEY, traces_sample_rate=1.0)
    level = logging.DEBUG if verbose else config.LOG_LEVEL.upper()
    logging.basicConfig(
        format="%(asctime)s %(levelname)s %(name)s: %(message)s"
    )
    logging.getLogger().setLevel(level)


def main(argv: Optional[List[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    if not argv or argv[0] not in COMMANDS:
        sys.stderr.write(
            "usage: gp-spectrum {" + ",".join(COMMANDS) + "} --config PATH "
            "[--out DIR] [--format csv|json] [--jobs K] [--verbose]\n"
        )
        return 1

    name = argv[0]
    command = COMMANDS[name]()
    parser = command.create_parser("gp-spectrum", name)
    try:
        options = vars(parser.parse_args(argv[1:]))
    except CommandError as e:
        command.stderr.write(f"❌ {e}")
        return 1

    configure(options.get("verbose", False))
    args = options.pop("args", ())
    try:
        command.execute(*args, **options)
    except SpectrumError as e:
        logger.error(f"{name} failed: {e.detail}")
        return e.exit_code
    return 0
