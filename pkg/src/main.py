"""Main entry point for the perspective-shift toolkit.

This module configures logging, wires adapters and use cases together and
maps failures to process exit codes.
"""

import json
import logging
import sys
from typing import Any, Optional

from pydantic import ValidationError

from src.adapters.cli_adapter import CliAdapter
from src.adapters.csv_report_adapter import CsvReportAdapter
from src.adapters.tensor_file_adapter import TensorFileAdapter
from src.config.settings import Settings
from src.domain.exceptions import TdkpsError, UsageError
from src.domain.use_cases.embed_usecase import EmbedUseCase
from src.domain.use_cases.power_sweep_usecase import PowerSweepUseCase
from src.domain.use_cases.scan_agents_usecase import ScanAgentsUseCase
from src.domain.use_cases.scan_groups_usecase import ScanGroupsUseCase
from src.domain.use_cases.shift_rank_usecase import ShiftRankUseCase
from src.domain.use_cases.simulate_usecase import SimulateUseCase
from src.domain.use_cases.test_agent_usecase import TestAgentUseCase
from src.domain.use_cases.test_group_usecase import TestGroupUseCase

# Attributes every LogRecord carries; anything else came in through ``extra``.
_RESERVED = frozenset(vars(logging.LogRecord("", 0, "", 0, "", None, None))) | {
    "message",
    "asctime",
}


class JsonFormatter(logging.Formatter):
    """One JSON object per record, including every ``extra`` field."""

    def format(self, record: logging.LogRecord) -> str:
        log_data: dict[str, Any] = {
            "timestamp": self.formatTime(record, self.datefmt),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
        }
        for key, value in vars(record).items():
            if key not in _RESERVED and not key.startswith("_"):
                log_data[key] = value

        if record.exc_info:
            log_data["exception"] = self.formatException(record.exc_info)

        return json.dumps(log_data, default=str)


def setup_logging(settings: Settings) -> None:
    """Configure logging based on settings.

    Logs go to stderr so stdout carries only command results.

    Args:
        settings: Application settings with log level and format
    """
    log_level = getattr(logging, settings.log_level.upper())

    handler = logging.StreamHandler(sys.stderr)
    if settings.log_format == "json":
        handler.setFormatter(JsonFormatter())
    else:
        handler.setFormatter(
            logging.Formatter("%(asctime)s - %(name)s - %(levelname)s - %(message)s")
        )

    logging.basicConfig(level=log_level, handlers=[handler], force=True)

    logger = logging.getLogger(__name__)
    logger.debug(
        "Logging configured",
        extra={"level": settings.log_level, "format": settings.log_format},
    )


def create_app(settings: Optional[Settings] = None) -> CliAdapter:
    """Create and configure the command-line application.

    This function implements dependency injection, wiring all components
    together following hexagonal architecture principles.

    Args:
        settings: Settings to use; loaded from the environment when omitted

    Returns:
        Configured CLI adapter
    """
    settings = settings if settings is not None else Settings()

    # Adapters (infrastructure layer)
    tensor_store = TensorFileAdapter()
    report_writer = CsvReportAdapter()

    # Use cases (application layer)
    return CliAdapter(
        settings=settings,
        simulate_uc=SimulateUseCase(tensor_store),
        embed_uc=EmbedUseCase(tensor_store, report_writer),
        test_agent_uc=TestAgentUseCase(tensor_store),
        test_group_uc=TestGroupUseCase(tensor_store),
        power_uc=PowerSweepUseCase(report_writer),
        scan_uc=ScanAgentsUseCase(tensor_store, report_writer),
        shift_rank_uc=ShiftRankUseCase(tensor_store),
        scan_group_uc=ScanGroupsUseCase(tensor_store, report_writer),
    )


def main(argv: Optional[list[str]] = None) -> int:
    """Run one command and return its exit code.

    0 on success, 2 for usage or configuration errors, 3 for data or format
    errors, 4 for numerical failures, 1 for anything unexpected.
    """
    try:
        settings = Settings()
    except ValidationError as e:
        sys.stderr.write(f"invalid TDKPS_ environment settings: {e}\n")
        return UsageError.exit_code
    setup_logging(settings)
    logger = logging.getLogger(__name__)

    try:
        return create_app(settings).run(argv)

    except SystemExit as e:
        # argparse usage errors and --help
        return e.code if isinstance(e.code, int) else UsageError.exit_code

    except TdkpsError as e:
        logger.error(
            "Command failed",
            extra={"error_type": type(e).__name__, "exit_code": e.exit_code},
        )
        sys.stderr.write(f"error: {e}\n")
        return e.exit_code

    except ValidationError as e:
        logger.error("Invalid arguments", extra={"error_type": "ValidationError"})
        sys.stderr.write(f"error: {e}\n")
        return UsageError.exit_code

    except KeyboardInterrupt:
        logger.info("Interrupted")
        return 130

    except Exception as e:
        logger.critical("Unexpected failure", exc_info=e)
        return 1


if __name__ == "__main__":
    sys.exit(main())
