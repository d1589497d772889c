"""The efrl logger and consoles.

``efrl.logger`` (also ``logging.getLogger("efrl")``) reports what a run is
doing: DNS progress, episode summaries, files read and written. Tables and
summaries that are results rather than events go through ``efrl.console``.
Both render with ``rich``. Each run directory also gets a machine-readable
copy of the log, one JSON object per line, see :func:`set_file_logger`.
"""

from __future__ import annotations

import configparser
import json
import logging
from typing import TYPE_CHECKING, Any

from rich import color, errors
from rich import print as printf
from rich.console import Console
from rich.logging import RichHandler
from rich.theme import Theme

if TYPE_CHECKING:
    from pathlib import Path

__all__ = ["make_logger", "parse_theme", "set_file_logger", "JSONFormatter"]

LOGGER_NAME = "efrl"

HIGHLIGHTED_KEYWORDS = [
    "Episode",
    "episodes",
    "blow-up",
    "blew",
    "Reading",
    "Writing",
    "Training",
    "Evaluating",
    "DNS",
    "checkpoint",
    "Invalid",
    "Aborting",
]

# layout options of the [logger] section that are not rich styles
_NON_STYLE_KEYS = ("log_width", "log_height", "log_timestamps", "log_to_file")

BAD_THEME_MESSAGE = """
[logging.level.error]The [logger] colours could not be parsed; falling back to
the default theme.[/logging.level.error]
"""


def make_logger(
    parser: configparser.SectionProxy,
    verbosity: str,
) -> tuple[logging.Logger, Console, Console]:
    """Set up the efrl logger and the two consoles.

    Parameters
    ----------
    parser
        The ``[logger]`` section of the configuration.
    verbosity
        A :mod:`logging` level name such as ``"INFO"``.

    Returns
    -------
    :class:`logging.Logger`, :class:`rich.Console`, :class:`rich.Console`
        The logger, a stdout console and a stderr console, all themed by
        :func:`parse_theme`.

    See Also
    --------
    :func:`~._config.utils.make_config_parser`, :func:`parse_theme`
    """
    theme = parse_theme(parser)
    width = _optional_int(parser.get("log_width", "-1"))
    console = Console(theme=theme, width=width)
    error_console = Console(theme=theme, width=width, stderr=True)

    logger = logging.getLogger(LOGGER_NAME)
    # the package may be imported more than once in a test session
    if not any(isinstance(h, RichHandler) for h in logger.handlers):
        logger.addHandler(
            RichHandler(
                console=console,
                show_time=parser.getboolean("log_timestamps", fallback=True),
                keywords=HIGHLIGHTED_KEYWORDS,
            )
        )
    logger.setLevel(verbosity.upper())
    return logger, console, error_console


def _optional_int(raw: str) -> int | None:
    value = int(raw)
    return None if value < 0 else value


def parse_theme(parser: configparser.SectionProxy) -> Theme | None:
    """The rich theme described by the ``logging_*`` and ``log_*`` keys.

    A key ``logging_level_info`` becomes the style ``logging.level.info``.
    Layout keys (width, height, timestamps, file logging) are not styles and
    are skipped.

    Returns
    -------
    :class:`rich.Theme` or None
        ``None`` when a colour does not parse; rich then uses its defaults.
    """
    styles = {
        key.replace("_", "."): value
        for key, value in parser.items()
        if key.startswith(("logging_", "log_")) and key not in _NON_STYLE_KEYS
    }
    try:
        return Theme(styles)
    except (color.ColorParseError, errors.StyleSyntaxError):
        printf(BAD_THEME_MESSAGE)
        return None


def set_file_logger(run_name: str, log_dir: Path) -> Path:
    """Send the efrl log of this run to ``<log_dir>/<run_name>.log`` as JSON lines.

    A file handler left by an earlier run in the same process is removed
    first, so every run directory only holds its own records.

    Returns
    -------
    :class:`pathlib.Path`
        The log file.
    """
    logger = logging.getLogger(LOGGER_NAME)
    for handler in [h for h in logger.handlers if isinstance(h, logging.FileHandler)]:
        logger.removeHandler(handler)
        handler.close()

    path = log_dir / f"{run_name}.log"
    handler = logging.FileHandler(path, mode="w")
    handler.setFormatter(JSONFormatter())
    logger.addHandler(handler)
    logger.info("Writing the log of %(run)s to %(path)s", {"run": run_name, "path": path})
    return path


class JSONFormatter(logging.Formatter):
    """One JSON object per record.

    Besides the rendered message the named arguments are kept under
    ``"args"``, so episode rewards and losses can be read back as numbers.
    """

    def format(self, record: logging.LogRecord) -> str:
        entry: dict[str, Any] = {
            "time": self.formatTime(record),
            "levelname": record.levelname,
            "module": record.module,
            "message": record.getMessage(),
        }
        if isinstance(record.args, dict):
            entry["args"] = record.args
        return json.dumps(entry, default=str)
