"""
Worked examples: degenerations, pencils, forms and algebras with known answers.

Pencils are written the way they are usually displayed, as matrices of linear
forms in ``x1, ..., xm`` whose coefficients may involve ``t``; the row index
is the second coordinate and the column index the third.
"""

from __future__ import annotations

import functools
import json
from importlib import resources
from typing import TYPE_CHECKING, Any

import numpy as np
from sympy import Poly, Symbol, expand
from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations

from . import linalg
from .algebra import (
    FiniteAlgebra,
    Functional,
    algebra_from_monomial_quotient,
    truncated_polynomial_algebra,
)
from .const import SERIES_PARAMETER
from .exact import RATIONALS, ScalarField, SeriesField, series_from_polynomial
from .segre import Degeneration
from .tensor import Monomial, Tensor, as_segre, symmetric_from_polynomial

if TYPE_CHECKING:
    from collections.abc import Sequence

    from .exact import Ring

_T = Symbol(SERIES_PARAMETER)
_TRANSFORMATIONS = (*standard_transformations, convert_xor)

# Coordinate orders for the order-sensitivity example (0-based)
ORDER_COLUMNS_FIRST = (2, 1, 0)
ORDER_ROWS_FIRST = (1, 2, 0)

# Decay exponent of the perturbing term in the small Coppersmith-Winograd example
SMALL_CW_DECAY = 4


def _variables(m: int) -> list[Symbol]:
    return [Symbol(f"x{k + 1}") for k in range(m)]


def _parse(text: str, names: Sequence[Symbol]) -> Any:
    local = {str(s): s for s in names} | {SERIES_PARAMETER: _T}
    return expand(parse_expr(text, local_dict=local, transformations=_TRANSFORMATIONS))


def _series(field_: ScalarField, coeff: Any) -> Any:
    """Turn a sympy polynomial in ``t`` into a series."""
    poly = Poly(coeff, _T)
    return series_from_polynomial(
        field_, {m[0]: field_.convert(c) for m, c in poly.terms()}
    )


def _ring_for(field_: ScalarField, exprs: Sequence[Any]) -> Ring:
    return SeriesField(field_) if any(e.has(_T) for e in exprs) else field_


def pencil(
    rows: Sequence[Sequence[str]], m: int, field_: ScalarField = RATIONALS
) -> Tensor:
    """Build ``T[i, j, k]`` = coefficient of ``x_{i+1}`` in entry ``(j, k)``."""
    xs = _variables(m)
    exprs = [[_parse(cell, xs) for cell in row] for row in rows]
    ring = _ring_for(field_, [e for row in exprs for e in row])
    entries = linalg.zeros(ring, (m, len(rows), len(rows[0])))
    for j, row in enumerate(exprs):
        for k, expr in enumerate(row):
            if expr == 0:
                continue
            for i, x in enumerate(xs):
                coeff = expr.coeff(x)
                if coeff != 0:
                    entries[i, j, k] = (
                        _series(field_, coeff)
                        if ring.is_series
                        else field_.convert(coeff)
                    )
    return Tensor(ring, entries)


def form(text: str, m: int, field_: ScalarField = RATIONALS) -> dict[Monomial, Any]:
    """Return the coefficients of a form in ``x1..xm``; series once ``t`` occurs."""
    xs = _variables(m)
    poly = Poly(_parse(text, xs), *xs)
    series = poly.as_expr().has(_T)
    return {
        exponent: _series(field_, coeff) if series else field_.convert(coeff)
        for exponent, coeff in poly.terms()
    }


def _vector(ring: Ring, n: int, text: str) -> np.ndarray:
    """Parse ``"t*a1 + a3"`` style vectors in the basis ``a1..an``."""
    names = [Symbol(f"a{k + 1}") for k in range(n)]
    expr = _parse(text, names)
    return np.array([_series(ring.base, expr.coeff(a)) for a in names], dtype=object)


def rank_one_sum(ring: Ring, n: int, summands: Sequence[Sequence[str]]) -> Tensor:
    """Return the sum of outer products of vectors written in ``a1..an``."""
    total = linalg.zeros(ring, (n,) * len(summands[0]))
    for factors in summands:
        vectors = [_vector(ring, n, text) for text in factors]
        total = total + functools.reduce(np.multiply.outer, vectors)
    return Tensor(ring, total)


def shipped_document(name: str) -> Any:
    """Return a JSON document shipped in the package data directory."""
    path = resources.files(__package__).joinpath("data", f"{name}.json")
    return json.loads(path.read_text(encoding="utf-8"))


# Order sensitivity of the Segre algorithm


def order_matters() -> Degeneration:
    """Return the 2×2×2 degeneration whose limit depends on the coordinate order."""
    return Degeneration(pencil([["x1", "t^2*x2"], ["t*x2", "t*x1"]], 2))


def order_matters_limits() -> tuple[Tensor, Tensor]:
    """Return the expected limits for columns first and for rows first."""
    return (
        pencil([["x1", "x2"], ["x2", "x1"]], 2),
        pencil([["x1", "0"], ["x2", "x1"]], 2),
    )


# Bini's border rank five decomposition


def bini_degeneration() -> Degeneration:
    """Return a degeneration of five rank one terms to a partial matrix product."""
    ring = SeriesField(RATIONALS)
    summands = [
        ("t*a1 + a3", "a2", "a2 + t*a4"),
        ("t*a1 + a2", "a1 + t*a3", "a1"),
        ("a2 + a3", "a1 + t*a4", "a2 + t*a3"),
        ("-a3 + t^2*a4", "a1 + a2 + t*a4 + t^2*a5", "a2"),
        ("-a2 + t^2*a5", "a1", "a1 + a2 + t*a3 + t^2*a5"),
    ]
    return Degeneration(rank_one_sum(ring, 5, summands))


def bini_unrestriction() -> Tensor:
    """Return the concise unrestriction in its display basis."""
    return pencil(
        [
            ["x1", "x5", "x3", "0", "x2"],
            ["0", "x1 + x4", "0", "x3", "0"],
            ["x2", "0", "0", "0", "0"],
            ["0", "x2", "0", "0", "0"],
            ["0", "x3", "0", "0", "0"],
        ],
        5,
    )


def bini_target() -> Tensor:
    """Return the partial matrix multiplication tensor, padded to 5×5×5."""
    return pencil(
        [
            ["x1", "0", "x3", "0", "0"],
            ["0", "x1", "0", "x3", "0"],
            ["x2", "0", "0", "0", "0"],
            ["0", "x2", "0", "0", "0"],
            ["0", "0", "0", "0", "0"],
        ],
        5,
    )


def bini_target_maps() -> list[np.ndarray]:
    """Return maps restricting :func:`bini_unrestriction` to :func:`bini_target`."""
    variables = linalg.as_matrix(RATIONALS, np.diag([1, 1, 1, 0, 0]))
    slices = linalg.as_matrix(RATIONALS, np.diag([1, 1, 1, 1, 0]))
    return [variables, slices, slices]


# e1 ∧ e2 ∧ e3 padded to 5×5×5


def wedge_tensor() -> Tensor:
    """Return ``e1 ∧ e2 ∧ e3`` inside k^5 ⊗ k^5 ⊗ k^5."""
    return pencil(
        [
            ["0", "x3", "-x2", "0", "0"],
            ["-x3", "0", "x1", "0", "0"],
            ["x2", "-x1", "0", "0", "0"],
            ["0", "0", "0", "0", "0"],
            ["0", "0", "0", "0", "0"],
        ],
        5,
    )


def wedge_unrestriction() -> Tensor:
    """Return the concise minimal border rank unrestriction of the wedge."""
    return pencil(
        [
            ["x5", "x3 + x4", "-x2", "x1", "x2"],
            ["-x3 + x4", "0", "x1", "0", "0"],
            ["x2", "-x1", "0", "0", "0"],
            ["x1", "0", "0", "0", "0"],
            ["x2", "0", "0", "0", "0"],
        ],
        5,
    )


def wedge_maps() -> list[np.ndarray]:
    """Return the coordinate projections onto the first three basis vectors."""
    keep = linalg.as_matrix(RATIONALS, np.diag([1, 1, 1, 0, 0]))
    return [keep, keep, keep]


# Small Coppersmith-Winograd tensor x1 x2 x3


def small_cw_degeneration(
    decay: int = SMALL_CW_DECAY, *, perturbed: bool = True
) -> dict[Monomial, Any]:
    """
    Return a border rank four witness for ``x1 x2 x3`` in four variables.

    Without the perturbing ``t^decay x4`` term the family is not concise.
    """
    text = "(x1 + t*x2 + t*x3)^3 - (x1 + t*x2)^3 - (x1 + t*x3)^3 + "
    text += f"(x1 + t^{decay}*x4)^3" if perturbed else "x1^3"
    return form(text, 4)


def small_cw_limit() -> dict[Monomial, Any]:
    """Return the expected concise limit ``x1 x2 x3 + x4 x1^2 / 2``."""
    return form("x1*x2*x3 + x4*x1^2/2", 4)


def small_cw_tensor() -> Tensor:
    """Return the limit as a symmetric tensor in S^3 k^4."""
    return symmetric_from_polynomial(RATIONALS, small_cw_limit(), 4, 3)


# Algebra gallery


def eps3_algebra(field_: ScalarField = RATIONALS) -> FiniteAlgebra:
    """Return ``k[ε]/(ε^3)``."""
    return truncated_polynomial_algebra(3, field_)


def eps3_dual_generator(field_: ScalarField = RATIONALS) -> Functional:
    """Return ``(ε^2)^*``."""
    return Functional.dual_basis(field_, 3, 2)


def eps3_cubic() -> Tensor:
    """Return ``x^2 z + x y^2`` as a symmetric 3×3×3 tensor."""
    cubic = form("x1^2*x3 + x1*x2^2", 3)
    return as_segre(symmetric_from_polynomial(RATIONALS, cubic, 3, 3))


def eps3_cubic_maps() -> list[np.ndarray]:
    """Return maps sending :func:`eps3_cubic` to the evaluation tensor of (ε^2)*."""
    return [
        linalg.as_matrix(RATIONALS, np.diag([3, 3, 3])),
        linalg.identity(RATIONALS, 3),
        linalg.identity(RATIONALS, 3),
    ]


def quotient_cubics() -> dict[int, Tensor]:
    """Return ``x^2 y`` and ``x^3`` keyed by the dual-basis functional on k[ε]/(ε^3)."""
    return {
        1: as_segre(symmetric_from_polynomial(RATIONALS, form("3*x1^2*x2", 2), 2, 3)),
        0: as_segre(symmetric_from_polynomial(RATIONALS, form("x1^3", 1), 1, 3)),
    }


def non_gorenstein_algebra(field_: ScalarField = RATIONALS) -> FiniteAlgebra:
    """Return ``k[x,y]/(x,y)^2``."""
    return algebra_from_monomial_quotient("k[x,y]/((x,y)^2)", field_)


def joint_surjectivity_algebra(field_: ScalarField = RATIONALS) -> FiniteAlgebra:
    """Return ``k[x]/(x^5)``."""
    return truncated_polynomial_algebra(5, field_)


def joint_surjectivity_map(field_: ScalarField = RATIONALS) -> np.ndarray:
    """Return the restriction dual to the inclusion of ``<1, x>`` into k[x]/(x^5)."""
    phi = linalg.zeros(field_, (2, 5))
    phi[0, 0] = field_.one
    phi[1, 1] = field_.one
    return phi
