"""Tests for exact linear algebra over fields and series."""

from __future__ import annotations

import random
from fractions import Fraction

import numpy as np
import pytest

from unrestrict import linalg
from unrestrict.exact import RATIONALS, ScalarField, SeriesField
from unrestrict.exceptions import ShapeMismatch, UnsupportedField


def _m(rows: list[list[int]]) -> np.ndarray:
    return linalg.as_matrix(RATIONALS, rows)


def test_rank_and_pivots() -> None:
    a = _m([[1, 2, 3], [2, 4, 6], [0, 1, 1]])
    assert linalg.rank(RATIONALS, a) == 2
    assert linalg.pivot_columns(RATIONALS, a) == [0, 1]


def test_rank_depends_on_characteristic() -> None:
    rows = [[1, 1], [1, -1]]
    assert linalg.rank(RATIONALS, _m(rows)) == 2
    f2 = ScalarField(2)
    assert linalg.rank(f2, linalg.as_matrix(f2, rows)) == 1


def test_nullspace_is_annihilated() -> None:
    a = _m([[1, 2, 3], [0, 1, 1]])
    kernel = linalg.nullspace(RATIONALS, a)
    assert len(kernel) == 1
    assert linalg.is_zero(linalg.matmul(RATIONALS, a, kernel[0]))


def test_solve_and_inconsistent_system() -> None:
    a = _m([[1, 1], [1, -1]])
    x = linalg.solve(RATIONALS, a, linalg.as_matrix(RATIONALS, [3, 1]))
    assert x is not None
    assert [RATIONALS.format(v) for v in x] == ["2", "1"]
    singular = _m([[1, 1], [2, 2]])
    rhs = linalg.as_matrix(RATIONALS, [1, 3])
    assert linalg.solve(RATIONALS, singular, rhs) is None


def test_inverse_and_determinant() -> None:
    a = _m([[2, 1], [1, 1]])
    inv = linalg.inverse(RATIONALS, a)
    product = linalg.matmul(RATIONALS, a, inv)
    assert linalg.arrays_equal(product, linalg.identity(RATIONALS, 2))
    assert RATIONALS.format(linalg.det(RATIONALS, _m([[0, 1], [1, 0]]))) == "-1"
    with pytest.raises(ZeroDivisionError, match="singular"):
        linalg.inverse(RATIONALS, _m([[1, 2], [2, 4]]))


def test_shape_errors() -> None:
    with pytest.raises(ShapeMismatch, match="cannot multiply"):
        linalg.matmul(RATIONALS, _m([[1, 2]]), _m([[1, 2]]))
    with pytest.raises(ShapeMismatch, match="non-square"):
        linalg.det(RATIONALS, _m([[1, 2]]))


def test_series_rank_uses_fraction_free_elimination(qt: SeriesField) -> None:
    t = qt.t
    a = linalg.as_matrix(qt, [[1, t], [t, t**2]])
    assert linalg.rank(qt, a) == 1
    b = linalg.as_matrix(qt, [[1, t], [t, t**2 + t**3]])
    assert linalg.rank(qt, b) == 2
    assert linalg.cleared_degrees(b) == [1, 3]


def test_series_rank_with_puiseux_entries(qt: SeriesField) -> None:
    half = qt.one.times_power(Fraction(1, 2))
    a = linalg.as_matrix(qt, [[half, qt.one], [qt.t, half]])
    assert linalg.rank(qt, a) == 1
    assert linalg.rank(qt, linalg.as_matrix(qt, [[half, qt.one], [qt.one, half]])) == 2


def test_generic_rank_of_pencil() -> None:
    # x0 * [[1, 0], [0, 0]] + x1 * [[0, 0], [0, 1]] has generic rank 2
    mats = [_m([[1, 0], [0, 0]]), _m([[0, 0], [0, 1]])]
    assert linalg.generic_rank_of_pencil(RATIONALS, mats) == 2
    nilpotent = [_m([[0, 1], [0, 0]])]
    assert linalg.generic_rank_of_pencil(RATIONALS, nilpotent) == 1


def test_full_rank_combination(rng: random.Random) -> None:
    mats = [_m([[1, 0], [0, 0]]), _m([[0, 0], [0, 1]])]
    coeffs = linalg.full_rank_combination(RATIONALS, mats, 2, rng)
    assert coeffs is not None
    assert linalg.rank(RATIONALS, linalg.combination(RATIONALS, mats, coeffs)) == 2
    nilpotent = [_m([[0, 1], [0, 0]])]
    assert linalg.full_rank_combination(RATIONALS, nilpotent, 2, rng) is None


def test_grid_search_needs_enough_elements(rng: random.Random) -> None:
    f2 = ScalarField(2)
    # x0 x1 (x0 + x1) vanishes on F_2 but not generically
    mats = [
        linalg.as_matrix(f2, m)
        for m in (
            [[1, 0, 0], [0, 0, 0], [0, 0, 1]],
            [[0, 0, 0], [0, 1, 0], [0, 0, 1]],
        )
    ]
    with pytest.raises(UnsupportedField, match="grid search"):
        linalg.full_rank_combination(f2, mats, 3, rng)
