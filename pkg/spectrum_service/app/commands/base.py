"""
Shared plumbing for the gp-spectrum subcommands
"""

import logging
import sys

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib
from pathlib import Path

from django.core.management.base import BaseCommand
from pydantic import ValidationError

from ..enums import OutputFormat
from ..exceptions import ConfigurationError
from ..output.writer import ResultWriter
from ..schemas.kernel_schemas import ExponentialSumKernel
from ..schemas.run_schemas import RunConfig
from ..services.kernel_service import kernel_service

logger = logging.getLogger(__name__)


class SpectrumCommand(BaseCommand):
    """Subcommand reading a TOML run configuration"""

    requires_system_checks = []
    requires_migrations_checks = False

    def add_arguments(self, parser):
        parser.add_argument(
            "--config",
            type=Path,
            required=True,
            help="Path to the TOML run configuration",
        )
        parser.add_argument(
            "--out",
            type=Path,
            default=None,
            help="Output directory (overrides [output].directory)",
        )
        parser.add_argument(
            "--format",
            choices=[f.value for f in OutputFormat],
            default=None,
            help="Output format (overrides [output].format)",
        )
        parser.add_argument(
            "--jobs",
            type=int,
            default=1,
            help="Worker processes for independent modes",
        )
        parser.add_argument(
            "--verbose",
            action="store_true",
            help="Log at DEBUG level",
        )

    @staticmethod
    def load_config(path: Path) -> RunConfig:
        """Parse and validate a run configuration file"""
        try:
            with open(path, "rb") as f:
                raw = tomllib.load(f)
        except FileNotFoundError:
            raise ConfigurationError(f"Config file not found: {path}")
        except tomllib.TOMLDecodeError as e:
            raise ConfigurationError(f"Malformed TOML in {path}: {e}")

        try:
            return RunConfig.model_validate(raw)
        except ValidationError as e:
            raise ConfigurationError(f"Invalid configuration: {e}")

    def prepare(self, options) -> RunConfig:
        run = self.load_config(options["config"])
        overrides = {}
        if options.get("out") is not None:
            overrides["directory"] = str(options["out"])
        if options.get("format") is not None:
            overrides["format"] = OutputFormat(options["format"])
        if overrides:
            run = run.model_copy(
                update={"output": run.output.model_copy(update=overrides)}
            )
        if options.get("jobs", 1) < 1:
            raise ConfigurationError("--jobs must be at least 1")
        logger.debug(f"Run configuration: {run.model_dump_json()}")
        return run

    @staticmethod
    def build_kernel(run: RunConfig) -> ExponentialSumKernel:
        return kernel_service.instantiate(
            run.kernel.as_family(), run.kernel.length
        )

    @staticmethod
    def writer(run: RunConfig) -> ResultWriter:
        return ResultWriter(run.output.directory, run.output.format)
