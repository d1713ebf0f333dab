"""Tests for brute-force point counts of the border rank two secant."""

from __future__ import annotations

import pytest

from unrestrict.exceptions import PreconditionFailure, TooLarge, UnsupportedField
from unrestrict.sigma2 import (
    csigma2_motive_formula,
    projective_space_count,
    sigma2_motive_formula,
)
from unrestrict.sigma2_scan import (
    census,
    count_csigma2_points,
    count_sigma2_points,
    scan,
)


def test_every_three_factor_tensor_lies_on_the_secant() -> None:
    counts = scan(3, 2, threads=1)
    assert counts.sigma2_points == projective_space_count(7, 2)
    assert counts.histogram[1] == 0
    assert counts.csigma2_points == csigma2_motive_formula(3)(2)


@pytest.mark.parametrize(("d", "p"), [(3, 2), (3, 3), (4, 2)])
def test_census_matches_the_formulas(d: int, p: int) -> None:
    report = census(d, p, threads=1)
    assert report["discrepancies"] == []
    assert report["sigma2"]["count"] == sigma2_motive_formula(d)(p)
    assert report["csigma2"]["count"] == csigma2_motive_formula(d)(p)
    assert sum(report["concise_histogram"]) == report["sigma2"]["count"]


@pytest.mark.slow
def test_census_four_factors_over_f3() -> None:
    assert census(4, 3)["discrepancies"] == []


def test_worker_count_does_not_change_the_result() -> None:
    single = scan(3, 3, threads=1, chunk_size=500)
    pooled = scan(3, 3, threads=2, chunk_size=500)
    assert single == pooled


def test_count_helpers() -> None:
    assert count_sigma2_points(3, 2, threads=1) == 255
    assert count_csigma2_points(3, 2, threads=1) == 1065


def test_scan_limits() -> None:
    with pytest.raises(TooLarge, match="exceeds the limit"):
        scan(5, 2)
    with pytest.raises(PreconditionFailure, match="3 to 5 factors"):
        scan(6, 2)
    with pytest.raises(UnsupportedField, match="not a prime"):
        scan(3, 4)
