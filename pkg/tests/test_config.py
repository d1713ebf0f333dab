"""Tests for environment configuration and logging setup."""

from __future__ import annotations

import logging

import colorlog
import pytest

from unrestrict.const import (
    DEFAULT_SEED,
    DEFAULT_THREADS,
    ENV_LOG_LEVEL,
    ENV_SEED,
    ENV_THREADS,
    configured_log_level,
    configured_seed,
    configured_threads,
)
from unrestrict.log import setup_logging


@pytest.fixture(autouse=True)
def _clean_env(monkeypatch: pytest.MonkeyPatch) -> None:
    for name in (ENV_THREADS, ENV_SEED, ENV_LOG_LEVEL):
        monkeypatch.delenv(name, raising=False)


def test_defaults() -> None:
    assert configured_threads() == DEFAULT_THREADS
    assert configured_seed() == DEFAULT_SEED
    assert configured_log_level() == "WARNING"


@pytest.mark.parametrize(
    ("raw", "expected"),
    [("8", 8), ("0", 1), ("-3", 1), ("", DEFAULT_THREADS), ("many", DEFAULT_THREADS)],
)
def test_threads_from_environment(
    monkeypatch: pytest.MonkeyPatch, raw: str, expected: int
) -> None:
    monkeypatch.setenv(ENV_THREADS, raw)
    assert configured_threads() == expected


def test_seed_and_level_from_environment(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setenv(ENV_SEED, "17")
    monkeypatch.setenv(ENV_LOG_LEVEL, "info")
    assert configured_seed() == 17
    assert configured_log_level() == "INFO"


def test_setup_logging_replaces_the_handler(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setenv(ENV_LOG_LEVEL, "error")
    logger = logging.getLogger("unrestrict")
    setup_logging()
    setup_logging()
    assert len(logger.handlers) == 1
    assert isinstance(logger.handlers[0].formatter, colorlog.ColoredFormatter)
    assert logger.level == logging.ERROR
    assert not logger.propagate
    setup_logging(debug=True)
    assert logger.level == logging.DEBUG
