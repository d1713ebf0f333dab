"""Logging setup for the command-line front end."""

from __future__ import annotations

import logging
import sys

import colorlog

from .const import configured_log_level

_FORMAT = "%(log_color)s%(asctime)s  %(levelname)-8s%(reset)s  %(name)s  %(message)s"
_LOG_COLORS = {
    "DEBUG": "cyan",
    "INFO": "green",
    "WARNING": "yellow",
    "ERROR": "red",
    "CRITICAL": "bold_red",
}


def setup_logging(*, debug: bool = False) -> None:
    """
    Install a coloured stderr handler on the package logger.

    Library modules only create loggers; the CLI is the single place that
    attaches a handler. Calling this twice replaces the previous handler.
    """
    handler = colorlog.StreamHandler(sys.stderr)
    handler.setFormatter(colorlog.ColoredFormatter(_FORMAT, log_colors=_LOG_COLORS))

    root = logging.getLogger("unrestrict")
    for existing in list(root.handlers):
        root.removeHandler(existing)
    root.addHandler(handler)
    root.setLevel(logging.DEBUG if debug else configured_log_level())
    root.propagate = False
