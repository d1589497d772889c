"""Utilities to read configuration files.

Configuration files are plain ``key = value`` INI files, read with
:mod:`configparser`. The packaged ``default.cfg`` holds every option; a user
file only needs the keys it changes.
"""

from __future__ import annotations

import configparser
from pathlib import Path

from ..typing import StrPath
from ..utils.exceptions import ConfigurationError

__all__ = ["DEFAULT_CONFIG_FILE", "make_config_parser", "read_user_config"]

DEFAULT_CONFIG_FILE = Path(__file__).resolve().parent / "default.cfg"


def make_config_parser(custom_file: StrPath | None = None) -> configparser.ConfigParser:
    """Make a :class:`configparser.ConfigParser` holding the defaults.

    Parameters
    ----------
    custom_file
        A user config file. Its values are layered on top of the defaults.

    Returns
    -------
    :class:`configparser.ConfigParser`
        The parser, with the packaged defaults first and ``custom_file`` read
        last.
    """
    parser = configparser.ConfigParser()
    with DEFAULT_CONFIG_FILE.open() as handle:
        parser.read_file(handle)
    if custom_file is not None:
        parser.read_dict(read_user_config(custom_file))
    return parser


def read_user_config(path: StrPath) -> configparser.ConfigParser:
    """Read a user config file on its own, without defaults.

    Raises
    ------
    :class:`~.ConfigurationError`
        If the file is missing or cannot be parsed.
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigurationError(f"Config file {path} does not exist")
    parser = configparser.ConfigParser()
    try:
        parser.read(path)
    except configparser.Error as e:
        raise ConfigurationError(f"Invalid config file {path}: {e}") from e
    return parser
