"""Options shared by the commands, and how they become a :class:`~.RunConfig`."""

from __future__ import annotations

__all__ = ["run_options", "resolve_config", "start_run", "exit_on_errors"]

import functools
import sys
from pathlib import Path
from typing import Any, Callable

import click
import cloup
from rich.markup import escape

from .. import config, error_console, logger
from .._config.logger_utils import set_file_logger
from .._config.run_config import RunConfig
from .._config.utils import make_config_parser, read_user_config
from ..constants import EXIT_BLOW_UP, EXIT_CONFIG_ERROR, PROFILES, Variant
from ..utils.exceptions import (
    BlowUpError,
    CheckpointError,
    ConfigurationError,
    GridMismatchError,
    SnapshotFormatError,
)
from ..utils.file_ops import guarantee_existence

run_options = cloup.option_group(
    "Run options",
    cloup.option(
        "-c",
        "--config",
        "config_file",
        type=click.Path(dir_okay=False, path_type=Path),
        help="A config file whose values override the defaults and the profile.",
    ),
    cloup.option(
        "--profile",
        type=click.Choice(sorted(PROFILES), case_sensitive=False),
        help="Problem size: the full-size setup or a small one for quick checks.",
    ),
    cloup.option("--seed", type=click.IntRange(min=0), help="Seed of the agent."),
    cloup.option(
        "--variant",
        type=click.Choice([v.value for v in Variant], case_sensitive=False),
        help="Reward and episode variant.",
    ),
    cloup.option("--episodes", type=click.IntRange(min=1), help="Training episode budget."),
    cloup.option(
        "-o",
        "--out",
        type=click.Path(file_okay=False, path_type=Path),
        help="Run directory.",
    ),
)


def resolve_config(
    config_file: Path | None = None,
    profile: str | None = None,
    **flags: Any,
) -> RunConfig:
    """Resolve defaults, profile, config file and flags, in that order.

    The result is also copied into the global ``efrl.config``.
    """
    user = read_user_config(config_file) if config_file is not None else None
    if "out" in flags and flags["out"] is not None:
        flags["out"] = str(flags["out"])
    resolved = RunConfig.from_sources(make_config_parser(), user, profile, **flags)
    config.update(resolved)
    return resolved


def start_run(resolved: RunConfig, command: str, config_file: Path | None) -> Path:
    """Create the run directory, write the resolved config and attach the file log."""
    out = guarantee_existence(resolved.out_dir)
    resolved.write(out / "config.cfg")
    if make_config_parser(config_file)["logger"].getboolean("log_to_file"):
        set_file_logger(command, out)
    return out


def exit_on_errors(command: Callable[..., Any]) -> Callable[..., Any]:
    """Map library errors to exit codes: 2 for configuration problems, 3 for a
    DNS blow-up."""

    @functools.wraps(command)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        try:
            return command(*args, **kwargs)
        except BlowUpError as e:
            error_console.print(f"[red]Aborting:[/red] {escape(str(e))}")
            logger.error("Aborting after a blow-up at step %(step)s", {"step": e.step})
            sys.exit(EXIT_BLOW_UP)
        except (
            ConfigurationError,
            GridMismatchError,
            CheckpointError,
            SnapshotFormatError,
        ) as e:
            error_console.print(f"[red]Invalid configuration:[/red] {escape(str(e))}")
            sys.exit(EXIT_CONFIG_ERROR)

    return wrapper
