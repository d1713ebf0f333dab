"""
The secant variety of border rank two tensors in (k^2)^{⊗d} and its concise model.

Covers normal forms of border rank two tensors, the torus fixed points of the
concise secant, their tangent weights, the cell decomposition they induce and
the closed motive formulas it is checked against. Weights are integer vectors
in the basis ``e_1, ..., e_d`` with ``deg x_i = -e_i`` and ``deg y_i = e_i``.
Coordinates are 0-based throughout.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from typing import TYPE_CHECKING, Any

from sympy import QQ, Poly, Rational, Symbol, binomial, sqrt
from sympy.ntheory import is_quad_residue

from . import linalg
from .analysis import centroid
from .const import BASE_X, BASE_Y, SIGMA2_KIND_B, SIGMA2_KIND_C
from .exceptions import DegenerateOnePS, PreconditionFailure, ShapeMismatch
from .tensor import Tensor, concise_coordinates, flatten

if TYPE_CHECKING:
    from collections.abc import Iterable, Sequence

_LOGGER = logging.getLogger(__name__)

_L = Symbol("L")
_MIN_ORDER = 3
_NORMAL_FORM_RANK = 2

Weight = tuple[int, ...]


@dataclass(frozen=True, slots=True)
class MotivePoly:
    """An integer polynomial in the Lefschetz class, coefficients ascending."""

    coefficients: tuple[int, ...]

    def __post_init__(self) -> None:
        """Drop trailing zeros."""
        coeffs = list(self.coefficients)
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs.pop()
        object.__setattr__(self, "coefficients", tuple(int(c) for c in coeffs) or (0,))

    @classmethod
    def from_exponents(cls, exponents: Iterable[int]) -> MotivePoly:
        """Return the sum of ``L**n`` over the given exponents."""
        counts: dict[int, int] = {}
        for n in exponents:
            counts[n] = counts.get(n, 0) + 1
        top = max(counts, default=0)
        return cls(tuple(counts.get(k, 0) for k in range(top + 1)))

    @classmethod
    def from_expression(cls, expr: Any) -> MotivePoly:
        """Expand a sympy expression in ``L``; every coefficient must be an integer."""
        poly = Poly(expr, _L, domain=QQ)
        coeffs = [Rational(c) for c in reversed(poly.all_coeffs())]
        if any(not c.is_integer for c in coeffs):
            msg = f"motive {poly.as_expr()} has non-integral coefficients"
            raise AssertionError(msg)
        return cls(tuple(int(c) for c in coeffs))

    @property
    def degree(self) -> int:
        """Return the degree."""
        return len(self.coefficients) - 1

    def __call__(self, value: int) -> int:
        """Evaluate at ``L = value``."""
        return sum(c * value**k for k, c in enumerate(self.coefficients))

    def __add__(self, other: MotivePoly) -> MotivePoly:
        """Add coefficientwise."""
        pairs = itertools.zip_longest(
            self.coefficients, other.coefficients, fillvalue=0
        )
        return MotivePoly(tuple(a + b for a, b in pairs))

    def betti_numbers(self) -> list[int]:
        """Return ``b_0, b_1, ..., b_{2n}``; odd Betti numbers vanish."""
        out = [0] * (2 * self.degree + 1)
        for k, c in enumerate(self.coefficients):
            out[2 * k] = c
        return out

    def __str__(self) -> str:
        """Render as a polynomial in L."""
        terms = [
            f"{c}" if k == 0 else f"{c}*L" if k == 1 else f"{c}*L^{k}"
            for k, c in enumerate(self.coefficients)
            if c
        ]
        return " + ".join(terms) or "0"


@dataclass(frozen=True, slots=True)
class NormalForm2:
    """
    Normal form ``B_I`` or ``C_I`` of a tensor of border rank at most two.

    ``discriminant`` is set for ``|I| ≥ 3``; ``split`` tells whether the two
    points of the decomposition are defined over the rationals.
    """

    kind: str
    concise: frozenset[int]
    discriminant: Any = None
    split: bool | None = None


@dataclass(frozen=True, slots=True)
class FixedPoint:
    """
    A torus-fixed point of the concise secant.

    Height one points carry the set of coordinates (among ``1..d-1``) that
    switch to the other basis vector in the second summand. Height two points
    carry the distinguished coordinate and a type in ``{1, 2, 3}``.
    """

    base: tuple[str, ...]
    height: int
    switched: frozenset[int] = frozenset()
    pair: int | None = None
    kind: int | None = None

    def as_dict(self) -> dict[str, Any]:
        """Return a JSON-friendly description."""
        out: dict[str, Any] = {"base": "".join(self.base), "height": self.height}
        if self.height == 1:
            out["switched"] = sorted(self.switched)
        else:
            out["pair"] = self.pair
            out["type"] = self.kind
        return out


def _check_order(d: int) -> None:
    if d < _MIN_ORDER:
        msg = f"the concise secant needs at least {_MIN_ORDER} factors, got {d}"
        raise PreconditionFailure(msg)


def enumerate_fixed_points(d: int) -> list[FixedPoint]:
    """Return every fixed point, grouped by the basis simple tensor underneath."""
    _check_order(d)
    tail = range(1, d)
    points: list[FixedPoint] = []
    for base in itertools.product((BASE_X, BASE_Y), repeat=d):
        for size in range(2, d):
            points.extend(
                FixedPoint(base, 1, frozenset(subset))
                for subset in itertools.combinations(tail, size)
            )
        points.extend(
            FixedPoint(base, 2, pair=j, kind=kind) for j in tail for kind in (1, 2, 3)
        )
    return points


def expected_fixed_point_count(d: int) -> int:
    """Return ``2^d (2^{d-1} + 2d - 3)``."""
    return 2**d * (2 ** (d - 1) + 2 * d - 3)


def _vector(d: int, parts: dict[int, int]) -> Weight:
    return tuple(parts.get(i, 0) for i in range(d))


def tangent_weights(fp: FixedPoint, d: int) -> list[Weight]:
    """
    Return the ``2d + 1`` tangent weights at a fixed point.

    The tables are written over the all-x base; a base with ``y`` in
    coordinate ``i`` flips the sign of the ``e_i`` component.
    """
    weights: list[Weight] = []
    if fp.height == 1:
        inside = fp.switched
        outside = [j for j in range(1, d) if j not in inside]
        for i in sorted(inside):
            weights += [_vector(d, {i: 2}), _vector(d, {i: -2})]
        for j in outside:
            weights += [_vector(d, {j: 2}), _vector(d, {j: 2})]
        block = dict.fromkeys(inside, 2)
        weights += [_vector(d, {0: 2}), _vector(d, block), _vector(d, {0: 2, **block})]
    else:
        j = fp.pair
        if j is None or fp.kind not in {1, 2, 3}:
            msg = f"height two point needs a pair and a type, got {fp}"
            raise ShapeMismatch(msg)
        rest = [k for k in range(1, d) if k != j]
        weights += [_vector(d, {0: 2}), _vector(d, {j: 2}), _vector(d, {0: 2, j: 2})]
        if fp.kind == 1:
            weights += [_vector(d, {j: 2}), _vector(d, {j: -2})]
            for k in rest:
                weights += [_vector(d, {k: 2}), _vector(d, {k: 2})]
        elif fp.kind == 2:  # noqa: PLR2004
            weights += [_vector(d, {j: -2}), _vector(d, {j: -4})]
            for k in rest:
                weights += [_vector(d, {k: 2}), _vector(d, {k: 2, j: 2})]
        else:
            weights += [_vector(d, {j: 2}), _vector(d, {j: 4})]
            for k in rest:
                weights += [_vector(d, {k: 2}), _vector(d, {k: 2, j: -2})]
    signs = [-1 if b == BASE_Y else 1 for b in fp.base]
    return [
        tuple(s * w for s, w in zip(signs, weight, strict=True)) for weight in weights
    ]


def default_one_ps(d: int, step: int = 9) -> tuple[int, ...]:
    """Return ``(1, K, K^2, ...)``; ``K = 9`` dominates every tangent weight sum."""
    return tuple(step**i for i in range(d))


def one_ps_alternatives(d: int) -> list[tuple[int, ...]]:
    """Return admissible subgroups: power vectors in several coordinate orders."""
    orders = [list(range(d)), list(reversed(range(d)))]
    orders += [[(i + shift) % d for i in range(d)] for shift in range(1, d)]
    out: list[tuple[int, ...]] = []
    for step in (9, 11):
        for order in orders:
            vector = [0] * d
            for rank, coord in enumerate(order):
                vector[coord] = step**rank
            out.append(tuple(vector))
    return out


def _pairing(weight: Weight, one_ps: Sequence[int]) -> int:
    return sum(w * e for w, e in zip(weight, one_ps, strict=True))


def cell_dimension(fp: FixedPoint, d: int, one_ps: Sequence[int]) -> int:
    """
    Return the dimension of the cell of ``fp``.

    It counts tangent weights with negative pairing, so that the fibre over
    a rank one tensor is a union of cells.
    """
    count = 0
    for weight in tangent_weights(fp, d):
        value = _pairing(weight, one_ps)
        if value == 0:
            msg = (
                f"subgroup {tuple(one_ps)} is orthogonal to weight {weight} "
                f"at {fp.as_dict()}"
            )
            raise DegenerateOnePS(msg)
        count += value < 0
    return count


def bb_motive(
    d: int,
    one_ps: Sequence[int] | None = None,
    points: Sequence[FixedPoint] | None = None,
) -> MotivePoly:
    """Sum ``L^{cell dimension}`` over the fixed points (all of them by default)."""
    _check_order(d)
    one_ps = tuple(one_ps) if one_ps is not None else default_one_ps(d)
    if len(one_ps) != d:
        msg = f"subgroup {one_ps} does not have {d} components"
        raise ShapeMismatch(msg)
    chosen = points if points is not None else enumerate_fixed_points(d)
    motive = MotivePoly.from_exponents(cell_dimension(fp, d, one_ps) for fp in chosen)
    _LOGGER.debug("Cell decomposition for d = %d gives %s", d, motive)
    return motive


def fixed_points_in_rank_one_fiber(d: int) -> list[FixedPoint]:
    """Return the fixed points over the all-x simple tensor."""
    return [fp for fp in enumerate_fixed_points(d) if all(b == BASE_X for b in fp.base)]


def _geometric(low: int, high: int) -> Any:
    return sum((_L**k for k in range(low, high + 1)), Rational(0))


def _csigma2_expression(d: int) -> Any:
    inner = Rational(1, 2) * ((1 + _L) ** (2 * (d - 1)) + (1 + _L**2) ** (d - 1))
    inner += _L * (1 + _L) ** (d - 1) * _geometric(0, d - 3)
    return (1 + _L) * (1 + _L**2) * inner


def _rank_one_fiber_expression(d: int) -> Any:
    return (_L + 1) ** (d - 1) + _geometric(1, d - 2) + (d - 1) * _L**2


def csigma2_motive_formula(d: int) -> MotivePoly:
    """Return the closed formula for the class of the concise secant."""
    _check_order(d)
    return MotivePoly.from_expression(_csigma2_expression(d))


def sigma2_motive_formula(d: int) -> MotivePoly:
    """Return the closed formula for the class of the secant variety."""
    _check_order(d)
    expr = _csigma2_expression(d)
    expr -= binomial(d, 2) * (_L**3 - _L) * (_L + _L**2) * (1 + _L) ** (d - 2)
    expr -= (_rank_one_fiber_expression(d) - 1) * (1 + _L) ** d
    return MotivePoly.from_expression(expr)


def rank_one_fiber_motive(d: int) -> MotivePoly:
    """Return the class of the fibre over a rank one tensor."""
    _check_order(d)
    return MotivePoly.from_expression(_rank_one_fiber_expression(d))


def concise_on_two_fiber_motive() -> MotivePoly:
    """Return the class of ℙ², the fibre over tensors concise on two factors."""
    return MotivePoly((1, 1, 1))


def _bipartitions(d: int) -> list[list[int]]:
    """Return one side of every bipartition, the side holding coordinate 0."""
    return [
        [0, *rest]
        for size in range(d - 1)
        for rest in itertools.combinations(range(1, d), size)
    ]


def classify_rank2(T: Tensor) -> NormalForm2 | None:
    """
    Return the normal form of a tensor of border rank at most two, else None.

    Membership is read off the flattening ranks. For three or more concise
    coordinates the centroid of the concise core is ``k[u]/(u^2 - a u - b)``;
    a zero discriminant ``a^2 + 4b`` means the W-state family ``C``.
    """
    if T.ring.is_series or not T.is_segre:
        msg = "classification needs a Segre tensor over the base field"
        raise PreconditionFailure(msg)
    if any(n != 2 for n in T.dims):  # noqa: PLR2004
        msg = f"dimensions {T.dims} are not all 2"
        raise ShapeMismatch(msg)
    if linalg.is_zero(T.entries):
        return None
    d = T.order
    for side in _bipartitions(d):
        if linalg.rank(T.ring, flatten(T, side)) > _NORMAL_FORM_RANK:
            _LOGGER.debug("Flattening along %s has rank above two", side)
            return None
    flags = concise_coordinates(T)
    concise = frozenset(i for i, ok in enumerate(flags) if ok)
    if len(concise) == 1:
        msg = "a border rank two tensor cannot be concise on exactly one factor"
        raise AssertionError(msg)
    if len(concise) < _MIN_ORDER:
        return NormalForm2(SIGMA2_KIND_B, concise)
    core = T.entries
    for j in sorted(set(range(d)) - concise, reverse=True):
        column = flatten(T, [j])
        row = next(r for r in range(2) if not linalg.is_zero(column[r]))
        core = core.take(row, axis=j)
    algebra = centroid(Tensor(T.ring, core)).algebra
    if algebra.dim != 2:  # noqa: PLR2004
        msg = f"centroid of a concise border rank two core has dimension {algebra.dim}"
        raise AssertionError(msg)
    # any element off the line of the unit generates the algebra
    u = next(
        algebra.basis_element(k)
        for k in range(2)
        if linalg.rank(
            T.ring, linalg.as_matrix(T.ring, [algebra.unit, algebra.basis_element(k)])
        )
        == 2  # noqa: PLR2004
    )
    square = algebra.multiply(u, u)
    basis = linalg.transpose(linalg.as_matrix(T.ring, [u, algebra.unit]))
    coords = linalg.solve(T.ring, basis, square)
    if coords is None:
        msg = "the square of a generator is not a combination of it and the unit"
        raise AssertionError(msg)
    a, b = (T.ring.to_sympy(c) for c in coords)
    discriminant = a**2 + 4 * b
    if discriminant == 0:
        return NormalForm2(SIGMA2_KIND_C, concise, discriminant, split=True)
    p = T.ring.p
    if p is None:
        split: bool | None = bool(sqrt(discriminant).is_Rational)
    elif p == 2:  # noqa: PLR2004
        split = None
    else:
        split = is_quad_residue(int(discriminant) % p, p)
    return NormalForm2(SIGMA2_KIND_B, concise, discriminant, split=split)


def normal_form_tensor(
    kind: str, concise: Iterable[int], d: int, field_: Any
) -> Tensor:
    """Return ``B_I`` or ``C_I`` with ``x = e_0`` and ``y = e_1`` in every factor."""
    inside = sorted(set(concise))
    values: dict[tuple[int, ...], Any] = {}
    if kind == SIGMA2_KIND_B:
        values[(0,) * d] = field_.one
        index = tuple(1 if i in inside else 0 for i in range(d))
        values[index] = values.get(index, field_.zero) + field_.one
    elif kind == SIGMA2_KIND_C:
        for i in inside:
            values[tuple(1 if k == i else 0 for k in range(d))] = field_.one
    else:
        msg = f"unknown normal form kind {kind!r}"
        raise ValueError(msg)
    return Tensor.from_entries(field_, (2,) * d, values)


def point_count_fiber(concise_count: int, d: int, p: int) -> int:
    """Return the number of F_p points of the concise secant over one secant point."""
    if concise_count == 0:
        return rank_one_fiber_motive(d)(p)
    if concise_count == 1:
        msg = "no point of the secant is concise on exactly one factor"
        raise AssertionError(msg)
    if concise_count == 2:  # noqa: PLR2004
        return concise_on_two_fiber_motive()(p)
    return 1


def projective_space_count(n: int, p: int) -> int:
    """Return the number of F_p points of P^n."""
    return (p ** (n + 1) - 1) // (p - 1)


def expected_counts(d: int, p: int) -> tuple[int, int]:
    """Return the motive predictions ``(σ₂, cσ₂)`` at ``L = p``."""
    return sigma2_motive_formula(d)(p), csigma2_motive_formula(d)(p)
