"""Fixtures for the unrestrict tests."""

from __future__ import annotations

import json
import random
from pathlib import Path
from typing import Any

import pytest

from unrestrict.const import DEFAULT_SEED
from unrestrict.exact import RATIONALS, ScalarField, SeriesField

REPO_ROOT = Path(__file__).resolve().parents[1]
FIXTURES = REPO_ROOT / "tests" / "fixtures"


def load_fixture(name: str) -> Any:
    """Return a JSON document from tests/fixtures."""
    return json.loads((FIXTURES / name).read_text(encoding="utf-8"))


@pytest.fixture
def rng() -> random.Random:
    """Return a deterministic random source."""
    return random.Random(DEFAULT_SEED)


@pytest.fixture
def qq() -> ScalarField:
    """Return the rationals."""
    return RATIONALS


@pytest.fixture
def qt() -> SeriesField:
    """Return rational functions in t over the rationals."""
    return SeriesField(RATIONALS)
