"""Set the global config and logger."""

from __future__ import annotations

from .logger_utils import make_logger
from .run_config import RunConfig
from .utils import make_config_parser

__all__ = [
    "logger",
    "console",
    "error_console",
    "config",
    "RunConfig",
    "make_config_parser",
]

parser = make_config_parser()

logger, console, error_console = make_logger(
    parser["logger"],
    parser["logger"]["verbosity"],
)

# The defaults, resolved. Commands resolve their own RunConfig from the command
# line and copy it in with config.update().
config = RunConfig.from_sources(parser)
