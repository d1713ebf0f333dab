"""
Exact base fields and rational functions in the deformation parameter.

A degeneration lives over the field of rational functions in ``t``. Puiseux
exponents are handled by a hidden uniformizer ``s`` with ``t = s**N``: every
:class:`SeriesElem` stores a reduced fraction of polynomials in ``s`` together
with its exponent denominator ``N``. Elements with different ``N`` are brought
to the least common multiple before any arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import TYPE_CHECKING, Any, Protocol

from sympy import GF, QQ, Rational, isprime
from sympy.core.sympify import SympifyError
from sympy.polys.rings import PolyElement, PolyRing

from .const import FIELD_RATIONALS, KEY_FIELD_PRIME, SERIES_PARAMETER
from .exceptions import NegativeValuation, UnsupportedField

if TYPE_CHECKING:
    import random
    from collections.abc import Iterable, Mapping

Valuation = Fraction | float


@lru_cache(maxsize=None)
def _domain(p: int | None) -> Any:
    return QQ if p is None else GF(p)


@lru_cache(maxsize=None)
def _series_ring(p: int | None) -> PolyRing:
    return PolyRing("s", _domain(p))


@dataclass(frozen=True, slots=True)
class ScalarField:
    """The exact base field: the rationals (``p is None``) or a prime field."""

    p: int | None = None

    def __post_init__(self) -> None:
        """Reject composite moduli."""
        if self.p is not None and (self.p < 2 or not isprime(self.p)):
            msg = f"{self.p} is not a prime"
            raise UnsupportedField(msg)

    @property
    def kind(self) -> str:
        """Return ``"Q"`` or ``"Fp"``."""
        return FIELD_RATIONALS if self.p is None else KEY_FIELD_PRIME

    @property
    def characteristic(self) -> int:
        """Return the characteristic (0 for the rationals)."""
        return 0 if self.p is None else self.p

    @property
    def domain(self) -> Any:
        """Return the sympy domain backing the field."""
        return _domain(self.p)

    @property
    def base(self) -> ScalarField:
        """Return the field itself (scalar rings are their own base)."""
        return self

    @property
    def is_series(self) -> bool:
        """Return False: scalars carry no deformation parameter."""
        return False

    @property
    def zero(self) -> Any:
        """Return the additive identity."""
        return self.domain.zero

    @property
    def one(self) -> Any:
        """Return the multiplicative identity."""
        return self.domain.one

    def supports_degree(self, nu: int) -> bool:
        """Return True if ``nu!`` is invertible (char 0 or char > nu)."""
        return self.p is None or self.p > nu

    def convert(self, value: Any) -> Any:
        """Convert an int, string, Fraction, sympy number or domain element."""
        if isinstance(value, SeriesElem):
            msg = "cannot convert a series to a scalar; take its limit first"
            raise TypeError(msg)
        domain = self.domain
        if isinstance(value, bool):
            value = int(value)
        if not isinstance(value, (int, str)) and domain.of_type(value):
            return value
        if isinstance(value, str):
            return self.parse(value)
        rational = Rational(value)
        numerator = domain.convert(int(rational.p))
        denominator = domain.convert(int(rational.q))
        if not denominator:
            msg = f"{value} has no image in F_{self.p}"
            raise ValueError(msg)
        return numerator / denominator

    def parse(self, text: str) -> Any:
        """Parse an exact rational string such as ``"-3/2"``."""
        try:
            rational = Rational(text.strip())
        except (TypeError, ValueError, SympifyError) as err:
            msg = f"malformed rational {text!r}"
            raise ValueError(msg) from err
        if not rational.is_Rational:
            msg = f"malformed rational {text!r}"
            raise ValueError(msg)
        return self.convert(rational)

    def to_rational(self, x: Any) -> Fraction:
        """Return ``x`` as a Fraction (prime field values as 0..p-1)."""
        value = self.domain.to_sympy(x)
        if self.p is not None:
            return Fraction(int(value) % self.p)
        return Fraction(int(value.p), int(value.q))

    def format(self, x: Any) -> str:
        """Format an element as an exact rational string."""
        value = self.to_rational(x)
        if value.denominator == 1:
            return str(value.numerator)
        return f"{value.numerator}/{value.denominator}"

    def to_sympy(self, x: Any) -> Any:
        """Return the sympy number for ``x``."""
        return self.domain.to_sympy(x)

    def limit(self, x: Any) -> Any:
        """Return ``x``: constants are their own limit."""
        return x

    def random_element(self, rng: random.Random, bound: int = 5) -> Any:
        """Return a small random element."""
        return self.convert(rng.randint(-bound, bound))

    def __str__(self) -> str:
        """Return ``Q`` or ``F_p``."""
        return "Q" if self.p is None else f"F_{self.p}"


RATIONALS = ScalarField()


def _poly_from_terms(field: ScalarField, terms: Mapping[int, Any]) -> PolyElement:
    ring = _series_ring(field.p)
    return ring.from_dict({(exp,): field.convert(c) for exp, c in terms.items() if c})


def _order(poly: PolyElement) -> int:
    return min(monom[0] for monom in poly.itermonoms())


def _inflate(poly: PolyElement, factor: int) -> PolyElement:
    if factor == 1:
        return poly
    return poly.ring.from_dict({(m[0] * factor,): c for m, c in poly.iterterms()})


def _deflate(poly: PolyElement, factor: int) -> PolyElement:
    if factor == 1:
        return poly
    return poly.ring.from_dict({(m[0] // factor,): c for m, c in poly.iterterms()})


class SeriesElem:
    """
    A rational function in ``t = s**N`` over an exact base field.

    The representation is canonical for a fixed ``N``: numerator and
    denominator are coprime and the denominator is monic. Equality and hashing
    compare values, independently of ``N``.
    """

    __slots__ = ("den", "field", "n", "num")

    field: ScalarField
    num: PolyElement
    den: PolyElement
    n: int

    def __init__(
        self, field: ScalarField, num: PolyElement, den: PolyElement, n: int = 1
    ) -> None:
        """Build the canonical form of ``num/den`` with exponent denominator n."""
        if not den:
            msg = "series with zero denominator"
            raise ZeroDivisionError(msg)
        if n < 1:
            msg = f"exponent denominator must be positive, got {n}"
            raise ValueError(msg)
        if not num:
            den = num.ring.one
        else:
            _, num, den = num.cofactors(den)
            lead = den.LC
            num = num.quo_ground(lead)
            den = den.monic()
        self.field = field
        self.num = num
        self.den = den
        self.n = n

    @classmethod
    def constant(cls, field: ScalarField, value: Any) -> SeriesElem:
        """Return a constant series."""
        ring = _series_ring(field.p)
        return cls(field, ring.ground_new(field.convert(value)), ring.one)

    @classmethod
    def t_power(cls, field: ScalarField, exponent: Fraction | int) -> SeriesElem:
        """Return ``t**exponent`` for a rational exponent."""
        exponent = Fraction(exponent)
        ring = _series_ring(field.p)
        n = exponent.denominator
        k = exponent.numerator
        if k >= 0:
            return cls(field, ring.from_dict({(k,): field.one}), ring.one, n)
        return cls(field, ring.one, ring.from_dict({(-k,): field.one}), n)

    @property
    def ring(self) -> SeriesField:
        """Return the series field the element lives in."""
        return SeriesField(self.field)

    def _coerce(self, other: Any) -> SeriesElem:
        if isinstance(other, SeriesElem):
            if other.field != self.field:
                msg = f"cannot combine series over {self.field} and {other.field}"
                raise TypeError(msg)
            return other
        return SeriesElem.constant(self.field, other)

    def _unified(
        self, other: SeriesElem
    ) -> tuple[int, PolyElement, PolyElement, PolyElement, PolyElement]:
        n = math.lcm(self.n, other.n)
        a, b = n // self.n, n // other.n
        return (
            n,
            _inflate(self.num, a),
            _inflate(self.den, a),
            _inflate(other.num, b),
            _inflate(other.den, b),
        )

    def __add__(self, other: Any) -> SeriesElem:
        """Return the sum."""
        other = self._coerce(other)
        n, an, ad, bn, bd = self._unified(other)
        if ad == bd:
            return SeriesElem(self.field, an + bn, ad, n)
        return SeriesElem(self.field, an * bd + bn * ad, ad * bd, n)

    __radd__ = __add__

    def __neg__(self) -> SeriesElem:
        """Return the negation."""
        return SeriesElem(self.field, -self.num, self.den, self.n)

    def __sub__(self, other: Any) -> SeriesElem:
        """Return the difference."""
        return self + (-self._coerce(other))

    def __rsub__(self, other: Any) -> SeriesElem:
        """Return ``other - self``."""
        return self._coerce(other) + (-self)

    def __mul__(self, other: Any) -> SeriesElem:
        """Return the product."""
        other = self._coerce(other)
        n, an, ad, bn, bd = self._unified(other)
        return SeriesElem(self.field, an * bn, ad * bd, n)

    __rmul__ = __mul__

    def __truediv__(self, other: Any) -> SeriesElem:
        """Return the quotient; dividing by zero raises ZeroDivisionError."""
        other = self._coerce(other)
        if not other.num:
            msg = "division by the zero series"
            raise ZeroDivisionError(msg)
        n, an, ad, bn, bd = self._unified(other)
        return SeriesElem(self.field, an * bd, ad * bn, n)

    def __rtruediv__(self, other: Any) -> SeriesElem:
        """Return ``other / self``."""
        return self._coerce(other) / self

    def __pow__(self, exponent: int) -> SeriesElem:
        """Return an integer power."""
        if exponent < 0:
            if not self.num:
                msg = "negative power of the zero series"
                raise ZeroDivisionError(msg)
            return SeriesElem(
                self.field, self.den**-exponent, self.num**-exponent, self.n
            )
        return SeriesElem(self.field, self.num**exponent, self.den**exponent, self.n)

    def __bool__(self) -> bool:
        """Return True for nonzero elements."""
        return bool(self.num)

    def _reduced(self) -> tuple[int, PolyElement, PolyElement]:
        exponents = [m[0] for m in self.num.itermonoms()]
        exponents += [m[0] for m in self.den.itermonoms()]
        factor = math.gcd(self.n, *exponents)
        return (
            self.n // factor,
            _deflate(self.num, factor),
            _deflate(self.den, factor),
        )

    def __eq__(self, other: object) -> bool:
        """Compare values, independently of the exponent denominator."""
        if isinstance(other, SeriesElem):
            if other.field != self.field:
                return False
        else:
            try:
                other = SeriesElem.constant(self.field, other)
            except (TypeError, ValueError):
                return NotImplemented
        _, an, ad, bn, bd = self._unified(other)
        return an == bn and ad == bd

    def __hash__(self) -> int:
        """Hash the reduced representation."""
        n, num, den = self._reduced()
        return hash(
            (self.field, n, tuple(sorted(num.items())), tuple(sorted(den.items())))
        )

    def valuation(self) -> Valuation:
        """Return the order at ``t = 0`` as a Fraction, or infinity for zero."""
        if not self.num:
            return math.inf
        return Fraction(_order(self.num) - _order(self.den), self.n)

    def limit_at_zero(self) -> Any:
        """Return the value at ``t = 0``."""
        value = self.valuation()
        if value < 0:
            msg = f"series {self} has valuation {value} < 0 and no limit at t = 0"
            raise NegativeValuation(msg)
        if value > 0:
            return self.field.zero
        zero = self.num.ring.domain.zero
        return self.num.get((0,), zero) / self.den.get((0,), zero)

    def initial_coefficient(self) -> Any:
        """Return the coefficient of the lowest-order term."""
        if not self.num:
            return self.field.zero
        low_num = self.num[(_order(self.num),)]
        low_den = self.den[(_order(self.den),)]
        return low_num / low_den

    def rescale_exponents(self, factor: int) -> SeriesElem:
        """Return the same value with exponent denominator ``n * factor``."""
        if factor < 1:
            msg = f"rescale factor must be positive, got {factor}"
            raise ValueError(msg)
        return SeriesElem(
            self.field,
            _inflate(self.num, factor),
            _inflate(self.den, factor),
            self.n * factor,
        )

    def times_power(self, exponent: Fraction | int) -> SeriesElem:
        """Return ``self * t**exponent``, rescaling when the exponent needs it."""
        exponent = Fraction(exponent)
        n = math.lcm(self.n, exponent.denominator)
        base = self.rescale_exponents(n // self.n)
        shift = int(exponent * n)
        ring = base.num.ring
        power = ring.from_dict({(abs(shift),): ring.domain.one})
        if shift >= 0:
            return SeriesElem(self.field, base.num * power, base.den, n)
        return SeriesElem(self.field, base.num, base.den * power, n)

    @property
    def is_constant(self) -> bool:
        """Return True if the element does not depend on ``t``."""
        return self.num.degree() <= 0 and self.den.degree() <= 0

    def degree_bound(self) -> int:
        """Return numerator plus denominator degree in ``s``."""
        return max(self.num.degree(), 0) + max(self.den.degree(), 0)

    def numerator_terms(self) -> list[tuple[int, Any]]:
        """Return ``(exponent in s, coefficient)`` pairs of the numerator."""
        return sorted((m[0], c) for m, c in self.num.iterterms())

    def denominator_terms(self) -> list[tuple[int, Any]]:
        """Return ``(exponent in s, coefficient)`` pairs of the denominator."""
        return sorted((m[0], c) for m, c in self.den.iterterms())

    def _format_poly(self, terms: Iterable[tuple[int, Any]]) -> str:
        parts: list[str] = []
        for exp, coeff in terms:
            text = self.field.format(coeff)
            power = Fraction(exp, self.n)
            if not power:
                parts.append(text)
                continue
            monomial = SERIES_PARAMETER if power == 1 else f"{SERIES_PARAMETER}^{power}"
            if power.denominator != 1:
                monomial = f"{SERIES_PARAMETER}^({power})"
            if text == "1":
                parts.append(monomial)
            elif text == "-1":
                parts.append(f"-{monomial}")
            else:
                parts.append(f"{text}*{monomial}")
        return " + ".join(parts).replace("+ -", "- ") or "0"

    def __str__(self) -> str:
        """Render as a rational function in ``t``."""
        num = self._format_poly(self.numerator_terms())
        if self.den == self.den.ring.one:
            return num
        den = self._format_poly(self.denominator_terms())
        return f"({num})/({den})"

    def __repr__(self) -> str:
        """Return a debugging representation."""
        return f"SeriesElem({self})"


def series_from_polynomial(
    field: ScalarField,
    coeffs: Mapping[int, Any],
    n: int = 1,
    den: Mapping[int, Any] | None = None,
) -> SeriesElem:
    """Build ``sum c_k s**k / sum d_k s**k`` with ``t = s**n``."""
    ring = _series_ring(field.p)
    denominator = _poly_from_terms(field, den) if den else ring.one
    return SeriesElem(field, _poly_from_terms(field, coeffs), denominator, n)


def substitute_power(x: SeriesElem, exponent: Fraction | int) -> SeriesElem:
    """Return ``x * t**exponent``."""
    return x.times_power(exponent)


def valuation(x: SeriesElem) -> Valuation:
    """Return the order of ``x`` at ``t = 0``."""
    return x.valuation()


def limit_at_zero(x: SeriesElem) -> Any:
    """Return the constant term of ``x``."""
    return x.limit_at_zero()


def rescale_exponents(x: SeriesElem, factor: int) -> SeriesElem:
    """Return ``x`` with its exponent denominator multiplied by ``factor``."""
    return x.rescale_exponents(factor)


@dataclass(frozen=True, slots=True)
class SeriesField:
    """Rational functions in ``t`` (with Puiseux rescaling) over a base field."""

    base: ScalarField

    @property
    def is_series(self) -> bool:
        """Return True."""
        return True

    @property
    def characteristic(self) -> int:
        """Return the characteristic of the base field."""
        return self.base.characteristic

    @property
    def zero(self) -> SeriesElem:
        """Return the zero series."""
        return SeriesElem.constant(self.base, 0)

    @property
    def one(self) -> SeriesElem:
        """Return the unit series."""
        return SeriesElem.constant(self.base, 1)

    @property
    def t(self) -> SeriesElem:
        """Return the deformation parameter."""
        return SeriesElem.t_power(self.base, 1)

    def convert(self, value: Any) -> SeriesElem:
        """Convert scalars and series into this field."""
        if isinstance(value, SeriesElem):
            if value.field != self.base:
                msg = f"series over {value.field} is not in {self}"
                raise TypeError(msg)
            return value
        return SeriesElem.constant(self.base, value)

    def limit(self, x: SeriesElem) -> Any:
        """Return the limit of ``x`` at ``t = 0``."""
        return x.limit_at_zero()

    def format(self, x: SeriesElem) -> str:
        """Render ``x``."""
        return str(x)

    def random_element(
        self, rng: random.Random, bound: int = 3, degree: int = 3
    ) -> SeriesElem:
        """Return a random polynomial in ``t`` of bounded degree."""
        coeffs = {k: rng.randint(-bound, bound) for k in range(degree + 1)}
        return series_from_polynomial(self.base, coeffs)

    def __str__(self) -> str:
        """Return ``Q(t)`` style notation."""
        return f"{self.base}({SERIES_PARAMETER})"


class Ring(Protocol):
    """Common surface of :class:`ScalarField` and :class:`SeriesField`."""

    @property
    def base(self) -> ScalarField: ...

    @property
    def is_series(self) -> bool: ...

    @property
    def zero(self) -> Any: ...

    @property
    def one(self) -> Any: ...

    def convert(self, value: Any) -> Any: ...

    def limit(self, x: Any) -> Any: ...

    def format(self, x: Any) -> str: ...


def common_ring(first: Ring, second: Ring) -> Ring:
    """Return the smallest ring containing both arguments."""
    if first.base != second.base:
        msg = f"incompatible base fields {first.base} and {second.base}"
        raise TypeError(msg)
    if first.is_series:
        return first
    return second


def min_valuation(values: Iterable[SeriesElem]) -> Valuation:
    """Return the minimal valuation (infinity for an empty or zero input)."""
    return min((v.valuation() for v in values), default=math.inf)
