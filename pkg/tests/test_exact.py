"""Tests for exact base fields and series in t."""

from __future__ import annotations

import math
from fractions import Fraction

import pytest

from unrestrict.exact import (
    RATIONALS,
    ScalarField,
    SeriesElem,
    SeriesField,
    common_ring,
    min_valuation,
    series_from_polynomial,
    substitute_power,
)
from unrestrict.exceptions import NegativeValuation, UnsupportedField


@pytest.mark.parametrize("p", [0, 1, 4, 9])
def test_composite_modulus_rejected(p: int) -> None:
    with pytest.raises(UnsupportedField, match="not a prime"):
        ScalarField(p)


def test_rational_strings_round_trip() -> None:
    for text in ("-3/2", "0", "7", "5/12"):
        assert RATIONALS.format(RATIONALS.parse(text)) == text


def test_malformed_rational() -> None:
    with pytest.raises(ValueError, match="malformed rational"):
        RATIONALS.parse("x/2")


def test_prime_field_conversion() -> None:
    f5 = ScalarField(5)
    assert f5.format(f5.convert("1/2")) == "3"
    assert f5.format(f5.convert(-1)) == "4"
    assert str(f5) == "F_5"
    assert f5.kind == "Fp"
    assert RATIONALS.kind == "Q"


def test_denominator_divisible_by_p() -> None:
    with pytest.raises(ValueError, match="no image"):
        ScalarField(3).convert(Fraction(1, 3))


def test_supports_degree() -> None:
    assert RATIONALS.supports_degree(10)
    assert ScalarField(5).supports_degree(4)
    assert not ScalarField(3).supports_degree(3)


def test_series_arithmetic_and_limit(qt: SeriesField) -> None:
    t = qt.t
    x = (t**2 + t) / t
    assert x == t + 1
    assert x.valuation() == 0
    assert RATIONALS.format(x.limit_at_zero()) == "1"
    assert (t * 3).limit_at_zero() == RATIONALS.zero


def test_negative_valuation_has_no_limit(qt: SeriesField) -> None:
    x = 1 / qt.t
    assert x.valuation() == -1
    with pytest.raises(NegativeValuation):
        x.limit_at_zero()


def test_zero_series() -> None:
    zero = SeriesField(RATIONALS).zero
    assert not zero
    assert zero.valuation() == math.inf
    assert min_valuation([]) == math.inf
    with pytest.raises(ZeroDivisionError):
        SeriesField(RATIONALS).one / zero


def test_puiseux_exponents() -> None:
    root = SeriesElem.t_power(RATIONALS, Fraction(1, 2))
    assert root.n == 2
    assert root.valuation() == Fraction(1, 2)
    assert root * root == SeriesField(RATIONALS).t
    cube_root = substitute_power(SeriesField(RATIONALS).one, Fraction(1, 3))
    assert cube_root.valuation() == Fraction(1, 3)


def test_equality_ignores_exponent_denominator(qt: SeriesField) -> None:
    t = qt.t
    rescaled = t.rescale_exponents(3)
    assert rescaled.n == 3
    assert rescaled == t
    assert hash(rescaled) == hash(t)


def test_initial_coefficient(qt: SeriesField) -> None:
    num = series_from_polynomial(RATIONALS, {2: 5, 3: 1})
    x = num / series_from_polynomial(RATIONALS, {0: 2, 1: 1})
    assert x.valuation() == 2
    assert RATIONALS.format(x.initial_coefficient()) == "5/2"
    assert not x.is_constant
    assert qt.convert(4).is_constant


def test_rendering() -> None:
    assert str(series_from_polynomial(RATIONALS, {0: 1, 2: -3})) == "1 - 3*t^2"
    assert str(SeriesElem.t_power(RATIONALS, Fraction(1, 2))) == "t^(1/2)"


def test_series_over_prime_field() -> None:
    f3 = ScalarField(3)
    t = SeriesField(f3).t
    assert (t + 1) ** 3 == t**3 + 1


def test_mixed_fields_rejected() -> None:
    with pytest.raises(TypeError, match="cannot combine"):
        SeriesField(RATIONALS).t + SeriesField(ScalarField(5)).t


def test_common_ring(qq: ScalarField, qt: SeriesField) -> None:
    assert common_ring(qq, qt) == qt
    assert common_ring(qt, qq) == qt
    assert common_ring(qq, qq) == qq
    with pytest.raises(TypeError, match="incompatible"):
        common_ring(qq, ScalarField(7))
