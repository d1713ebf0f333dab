"""Tests for the registered worked examples."""

from __future__ import annotations

import pytest

from unrestrict.exceptions import UnknownExample
from unrestrict.reproductions import (
    REGISTRY,
    Check,
    ReproductionReport,
    run_reproduction,
)

_SLOW = {"bini", "sigma2_small"}


@pytest.mark.parametrize(
    "name",
    [
        pytest.param(name, marks=pytest.mark.slow) if name in _SLOW else name
        for name in REGISTRY
    ],
)
def test_every_example_passes(name: str) -> None:
    report = run_reproduction(name, seed=1)
    failed = [c.as_dict() for c in report.checks if not c.passed]
    assert report.checks
    assert failed == []
    assert report.passed


def test_unknown_example() -> None:
    with pytest.raises(UnknownExample, match="unknown example 'nope'"):
        run_reproduction("nope")


def test_failed_check_carries_the_diff() -> None:
    report = ReproductionReport("demo")
    report.check("same", 3, 3)
    report.check("differs", [1, 2], (1, 3))
    assert not report.passed
    assert report.as_dict() == {
        "name": "demo",
        "passed": False,
        "checks": [
            {"name": "same", "passed": True},
            {"name": "differs", "passed": False, "expected": [1, 3], "actual": [1, 2]},
        ],
    }


def test_passing_check_hides_values() -> None:
    check = Check("ok", passed=True, expected=1, actual=1)
    assert check.as_dict() == {"name": "ok", "passed": True}
