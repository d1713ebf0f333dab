"""
Exact dense linear algebra over a base field or its series field.

Matrices are numpy object arrays whose entries all belong to one ring. Every
function takes that ring explicitly so that zero and one are well defined even
for empty shapes.
"""

from __future__ import annotations

import itertools
import logging
import math
from typing import TYPE_CHECKING, Any

import numpy as np
from sympy.polys.rings import PolyElement, PolyRing

from .exact import SeriesElem
from .exceptions import ShapeMismatch, UnsupportedField

if TYPE_CHECKING:
    import random
    from collections.abc import Callable, Iterable, Sequence

    from .exact import Ring, ScalarField

_LOGGER = logging.getLogger(__name__)

_RANDOM_ATTEMPTS = 8


def zeros(ring: Ring, shape: tuple[int, ...]) -> np.ndarray:
    """Return a zero array of the given shape."""
    return np.full(shape, ring.zero, dtype=object)


def identity(ring: Ring, n: int) -> np.ndarray:
    """Return the n x n identity matrix."""
    out = zeros(ring, (n, n))
    for i in range(n):
        out[i, i] = ring.one
    return out


def as_matrix(ring: Ring, rows: Iterable[Iterable[Any]] | np.ndarray) -> np.ndarray:
    """Convert nested rows into an object matrix over ``ring``."""
    raw = np.array(rows, dtype=object)
    if raw.ndim == 1 and raw.size == 0:
        raw = raw.reshape(0, 0)
    return convert_array(ring, raw)


def convert_array(ring: Ring, array: np.ndarray) -> np.ndarray:
    """Convert every entry of an array into ``ring``."""
    out = np.empty(array.shape, dtype=object)
    for index in np.ndindex(array.shape):
        out[index] = ring.convert(array[index])
    return out


def map_array(array: np.ndarray, func: Callable[[Any], Any]) -> np.ndarray:
    """Apply ``func`` entrywise, keeping the object dtype."""
    out = np.empty(array.shape, dtype=object)
    for index in np.ndindex(array.shape):
        out[index] = func(array[index])
    return out


def limit_matrix(ring: Ring, array: np.ndarray) -> np.ndarray:
    """Return the entrywise limit at ``t = 0`` over the base field."""
    return map_array(array, ring.limit)


def is_zero(array: np.ndarray) -> bool:
    """Return True if every entry vanishes."""
    return not any(bool(x) for x in array.flat)


def arrays_equal(first: np.ndarray, second: np.ndarray) -> bool:
    """Compare shapes and entries exactly."""
    if first.shape != second.shape:
        return False
    return all(a == b for a, b in zip(first.flat, second.flat, strict=True))


def matmul(ring: Ring, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Return the matrix product ``a @ b``."""
    if a.shape[-1] != b.shape[0]:
        msg = f"cannot multiply {a.shape} by {b.shape}"
        raise ShapeMismatch(msg)
    if a.shape[-1] == 0:
        return zeros(ring, a.shape[:-1] + b.shape[1:])
    return a @ b


def transpose(a: np.ndarray) -> np.ndarray:
    """Return the transpose as a fresh array."""
    return np.array(a.T, dtype=object)


def rref(ring: Ring, a: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Return the reduced row echelon form and its pivot columns."""
    m = np.array(a, dtype=object, copy=True)
    n_rows, n_cols = m.shape
    pivots: list[int] = []
    row = 0
    for col in range(n_cols):
        if row == n_rows:
            break
        pivot = next((i for i in range(row, n_rows) if m[i, col]), None)
        if pivot is None:
            continue
        if pivot != row:
            m[[row, pivot]] = m[[pivot, row]]
        lead = m[row, col]
        m[row, col:] = [x / lead for x in m[row, col:]]
        for i in range(n_rows):
            factor = m[i, col]
            if i != row and factor:
                m[i, col:] = [
                    x - factor * y
                    for x, y in zip(m[i, col:], m[row, col:], strict=True)
                ]
        pivots.append(col)
        row += 1
    if m.size:
        m = convert_array(ring, m)
    return m, pivots


def _cleared_rows(a: np.ndarray) -> list[list[PolyElement]]:
    """Return the rows of a series matrix as polynomials in the uniformizer."""
    entries = list(a.flat)
    n = math.lcm(1, *(x.n for x in entries))
    rows: list[list[PolyElement]] = []
    for raw in a:
        scaled = [x.rescale_exponents(n // x.n) for x in raw]
        common = scaled[0].den
        for x in scaled[1:]:
            common = common.lcm(x.den)
        rows.append([x.num * common.exquo(x.den) for x in scaled])
    return rows


def cleared_degrees(a: np.ndarray) -> list[int]:
    """Return the degree in the uniformizer of each row after clearing denominators."""
    if a.size == 0:
        return [0] * a.shape[0]
    return [
        max((max(p.degree(), 0) for p in row), default=0) for row in _cleared_rows(a)
    ]


def bareiss_pivots(rows: Sequence[Sequence[PolyElement]]) -> list[int]:
    """
    Return the pivot columns of a polynomial matrix.

    Fraction-free elimination keeps every intermediate entry a minor of the
    input, so each update divides exactly by the previous pivot.
    """
    m = [list(r) for r in rows]
    if not m or not m[0]:
        return []
    poly_ring = m[0][0].ring
    n_rows, n_cols = len(m), len(m[0])
    previous = poly_ring.one
    pivots: list[int] = []
    row = 0
    for col in range(n_cols):
        if row == n_rows:
            break
        pivot = next((i for i in range(row, n_rows) if m[i][col]), None)
        if pivot is None:
            continue
        m[row], m[pivot] = m[pivot], m[row]
        lead = m[row][col]
        for i in range(row + 1, n_rows):
            below = m[i][col]
            for j in range(col + 1, n_cols):
                m[i][j] = (lead * m[i][j] - below * m[row][j]).exquo(previous)
            m[i][col] = poly_ring.zero
        previous = lead
        pivots.append(col)
        row += 1
    return pivots


def pivot_columns(ring: Ring, a: np.ndarray) -> list[int]:
    """Return the lexicographically first maximal set of independent columns."""
    if a.size == 0:
        return []
    if ring.is_series:
        return bareiss_pivots(_cleared_rows(a))
    return rref(ring, a)[1]


def rank(ring: Ring, a: np.ndarray) -> int:
    """Return the rank over the fraction field of ``ring``."""
    return len(pivot_columns(ring, a))


def nullspace(ring: Ring, a: np.ndarray) -> list[np.ndarray]:
    """Return a basis of the right kernel, one free variable set to one."""
    n_cols = a.shape[1]
    reduced, pivots = rref(ring, a)
    basis: list[np.ndarray] = []
    for free in (c for c in range(n_cols) if c not in pivots):
        vector = zeros(ring, (n_cols,))
        vector[free] = ring.one
        for row, col in enumerate(pivots):
            vector[col] = -reduced[row, free]
        basis.append(vector)
    return basis


def solve(ring: Ring, a: np.ndarray, b: np.ndarray) -> np.ndarray | None:
    """
    Solve ``a @ x = b`` for a vector or matrix right-hand side.

    Returns one solution (free variables set to zero) or None if the system is
    inconsistent.
    """
    vector = b.ndim == 1
    rhs = b.reshape(-1, 1) if vector else b
    if rhs.shape[0] != a.shape[0]:
        msg = f"right-hand side has {rhs.shape[0]} rows, expected {a.shape[0]}"
        raise ShapeMismatch(msg)
    n_cols = a.shape[1]
    augmented = np.concatenate([a, rhs], axis=1)
    reduced, pivots = rref(ring, augmented)
    if any(p >= n_cols for p in pivots):
        return None
    solution = zeros(ring, (n_cols, rhs.shape[1]))
    for row, col in enumerate(pivots):
        solution[col, :] = reduced[row, n_cols:]
    return solution[:, 0] if vector else solution


def inverse(ring: Ring, a: np.ndarray) -> np.ndarray:
    """Return the inverse of a square matrix; ZeroDivisionError if it is singular."""
    n = a.shape[0]
    if a.shape != (n, n):
        msg = f"cannot invert a {a.shape} matrix"
        raise ShapeMismatch(msg)
    reduced, pivots = rref(ring, np.concatenate([a, identity(ring, n)], axis=1))
    if pivots[:n] != list(range(n)):
        msg = "matrix is singular"
        raise ZeroDivisionError(msg)
    return reduced[:, n:]


def det(ring: Ring, a: np.ndarray) -> Any:
    """Return the determinant by Gaussian elimination."""
    n = a.shape[0]
    if a.shape != (n, n):
        msg = f"determinant of a non-square {a.shape} matrix"
        raise ShapeMismatch(msg)
    m = np.array(a, dtype=object, copy=True)
    result = ring.one
    for col in range(n):
        pivot = next((i for i in range(col, n) if m[i, col]), None)
        if pivot is None:
            return ring.zero
        if pivot != col:
            m[[col, pivot]] = m[[pivot, col]]
            result = -result
        lead = m[col, col]
        result = result * lead
        for i in range(col + 1, n):
            factor = m[i, col] / lead
            if factor:
                m[i, col:] = [
                    x - factor * y
                    for x, y in zip(m[i, col:], m[col, col:], strict=True)
                ]
    return ring.convert(result)


def is_invertible(ring: Ring, a: np.ndarray) -> bool:
    """Return True for square matrices of full rank."""
    return a.shape[0] == a.shape[1] and rank(ring, a) == a.shape[0]


def combination(
    field: ScalarField, mats: Sequence[np.ndarray], coeffs: Sequence[Any]
) -> np.ndarray:
    """Return ``sum coeffs[k] * mats[k]``."""
    out = zeros(field, mats[0].shape)
    for coeff, mat in zip(coeffs, mats, strict=True):
        if coeff:
            out = out + mat * coeff
    return out


def generic_rank_of_pencil(field: ScalarField, mats: Sequence[np.ndarray]) -> int:
    """
    Return the rank of ``sum x_k mats[k]`` with indeterminate ``x_k``.

    The pencil is built over a polynomial ring in fresh variables and its rank
    is computed by fraction-free elimination, so the answer is exact over
    every field.
    """
    if not mats:
        return 0
    poly_ring = PolyRing(tuple(f"x{k}" for k in range(len(mats))), field.domain)
    n_rows, n_cols = mats[0].shape
    count = len(mats)
    unit_monoms = [tuple(int(j == k) for j in range(count)) for k in range(count)]
    rows = [
        [
            poly_ring.from_dict(
                {unit_monoms[k]: mat[i, j] for k, mat in enumerate(mats) if mat[i, j]}
            )
            for j in range(n_cols)
        ]
        for i in range(n_rows)
    ]
    return len(bareiss_pivots(rows))


def full_rank_combination(
    field: ScalarField,
    mats: Sequence[np.ndarray],
    target: int,
    rng: random.Random,
) -> list[Any] | None:
    """
    Return coefficients whose combination of ``mats`` has rank ``target``.

    Random combinations are tried first. If they fail, the generic rank decides
    exactly whether such coefficients exist; when they do, the grid
    ``{0..target}^K`` is searched, which always contains a witness because
    every relevant minor has degree at most ``target`` in each variable.
    """
    if not mats:
        return None
    for _ in range(_RANDOM_ATTEMPTS):
        coeffs = [field.random_element(rng, bound=max(5, 2 * target)) for _ in mats]
        if rank(field, combination(field, mats, coeffs)) >= target:
            return coeffs
    if generic_rank_of_pencil(field, mats) < target:
        _LOGGER.debug("Generic rank of %d matrices is below %d", len(mats), target)
        return None
    if field.p is not None and field.p <= target:
        msg = f"grid search for rank {target} needs more than {field.p} field elements"
        raise UnsupportedField(msg)
    _LOGGER.debug(
        "Random combinations failed; searching the grid of side %d", target + 1
    )
    grid = [field.convert(v) for v in range(target + 1)]
    for point in itertools.product(grid, repeat=len(mats)):
        coeffs = list(point)
        if rank(field, combination(field, mats, coeffs)) >= target:
            return coeffs
    msg = "grid search found no witness although the generic rank is full"
    raise AssertionError(msg)


def series_entries(array: np.ndarray) -> list[SeriesElem]:
    """Return the nonzero series entries of an array."""
    return [x for x in array.flat if isinstance(x, SeriesElem) and x]
