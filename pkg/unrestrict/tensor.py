"""Dense multiway tensors, flattenings, restrictions and conciseness."""

from __future__ import annotations

import itertools
import logging
import math
from collections import Counter
from typing import TYPE_CHECKING, Any

import numpy as np

from . import linalg
from .const import MAX_TENSOR_ORDER, PENCIL_VARIABLE
from .exact import SeriesElem, SeriesField, common_ring
from .exceptions import ShapeMismatch, UnsupportedField

if TYPE_CHECKING:
    from collections.abc import Callable, Iterable, Mapping, Sequence

    from .exact import Ring

_LOGGER = logging.getLogger(__name__)

Monomial = tuple[int, ...]


class Tensor:
    """
    A dense tensor in S^{ν_1}V_1 ⊗ ... ⊗ S^{ν_d}V_d over an exact ring.

    Coordinate ``i`` occupies ``fmt[i]`` consecutive axes of ``entries``, each
    of length ``dims[i]``. Blocks with ``fmt[i] > 1`` must be symmetric under
    permutations of their axes.
    """

    __slots__ = ("dims", "entries", "fmt", "ring")

    __hash__ = None  # type: ignore[assignment]

    def __init__(
        self,
        ring: Ring,
        entries: np.ndarray,
        fmt: Sequence[int] | None = None,
        *,
        dims: Sequence[int] | None = None,
    ) -> None:
        """Validate shape and symmetry, then freeze the entries."""
        array = np.asarray(entries, dtype=object)
        if fmt is None:
            fmt = (1,) * array.ndim
        fmt = tuple(int(nu) for nu in fmt)
        if any(nu < 1 for nu in fmt) or not fmt:
            msg = f"format {fmt} must be a nonempty list of positive integers"
            raise ShapeMismatch(msg)
        if sum(fmt) != array.ndim:
            msg = f"format {fmt} needs {sum(fmt)} axes, entries have {array.ndim}"
            raise ShapeMismatch(msg)
        if not 2 <= array.ndim <= MAX_TENSOR_ORDER:
            msg = (
                f"tensors need between 2 and {MAX_TENSOR_ORDER} axes, "
                f"got {array.ndim}"
            )
            raise ShapeMismatch(msg)
        block_dims: list[int] = []
        axis = 0
        for nu in fmt:
            sizes = set(array.shape[axis : axis + nu])
            if len(sizes) != 1:
                msg = (
                    f"axes {axis}..{axis + nu - 1} of a symmetric block "
                    "differ in length"
                )
                raise ShapeMismatch(msg)
            block_dims.append(array.shape[axis])
            axis += nu
        if any(n < 1 for n in block_dims):
            msg = f"dimensions {block_dims} must be positive"
            raise ShapeMismatch(msg)
        if dims is not None and tuple(dims) != tuple(block_dims):
            msg = f"dimensions {tuple(dims)} do not match entries {tuple(block_dims)}"
            raise ShapeMismatch(msg)
        self.ring = ring
        self.fmt = fmt
        self.dims = tuple(block_dims)
        self.entries = linalg.convert_array(ring, array)
        self.entries.flags.writeable = False
        self._check_symmetry()

    def _check_symmetry(self) -> None:
        for i, nu in enumerate(self.fmt):
            start = self.block_axes(i)[0]
            for a in range(start, start + nu - 1):
                swapped = np.swapaxes(self.entries, a, a + 1)
                if not linalg.arrays_equal(swapped, self.entries):
                    msg = f"coordinate {i + 1} is not symmetric across its {nu} axes"
                    raise ShapeMismatch(msg)

    @classmethod
    def zeros(
        cls, ring: Ring, dims: Sequence[int], fmt: Sequence[int] | None = None
    ) -> Tensor:
        """Return the zero tensor."""
        fmt = tuple(fmt) if fmt is not None else (1,) * len(dims)
        shape = tuple(n for n, nu in zip(dims, fmt, strict=True) for _ in range(nu))
        return cls(ring, linalg.zeros(ring, shape), fmt)

    @classmethod
    def from_entries(
        cls,
        ring: Ring,
        dims: Sequence[int],
        values: Mapping[tuple[int, ...], Any],
        fmt: Sequence[int] | None = None,
    ) -> Tensor:
        """Build a tensor from sparse ``{axis index: value}`` data."""
        fmt = tuple(fmt) if fmt is not None else (1,) * len(dims)
        shape = tuple(n for n, nu in zip(dims, fmt, strict=True) for _ in range(nu))
        array = linalg.zeros(ring, shape)
        for index, value in values.items():
            in_range = all(
                0 <= k < n for k, n in zip(index, shape, strict=True)
            )
            if len(index) != len(shape) or not in_range:
                msg = f"index {index} out of range for shape {shape}"
                raise ShapeMismatch(msg)
            array[tuple(index)] = ring.convert(value)
        return cls(ring, array, fmt)

    @property
    def order(self) -> int:
        """Return the number of coordinates d."""
        return len(self.dims)

    @property
    def shape(self) -> tuple[int, ...]:
        """Return the shape of the underlying array."""
        return self.entries.shape

    @property
    def is_segre(self) -> bool:
        """Return True if no coordinate carries symmetry."""
        return all(nu == 1 for nu in self.fmt)

    def block_axes(self, i: int) -> range:
        """Return the array axes belonging to coordinate ``i``."""
        start = sum(self.fmt[:i])
        return range(start, start + self.fmt[i])

    def nonzero(self) -> dict[tuple[int, ...], Any]:
        """Return ``{index: value}`` for every nonzero entry, lex ordered."""
        return {
            index: self.entries[index]
            for index in np.ndindex(self.shape)
            if self.entries[index]
        }

    def with_ring(self, ring: Ring) -> Tensor:
        """Return the same tensor with entries converted to ``ring``."""
        return Tensor(ring, self.entries, self.fmt)

    def __eq__(self, other: object) -> bool:
        """Compare format and entries exactly."""
        if not isinstance(other, Tensor):
            return NotImplemented
        return self.fmt == other.fmt and linalg.arrays_equal(
            self.entries, other.entries
        )

    def __repr__(self) -> str:
        """Return a short description."""
        return f"Tensor(dims={self.dims}, fmt={self.fmt}, ring={self.ring})"


def _check_coordinate(T: Tensor, i: int) -> None:
    if not 0 <= i < T.order:
        msg = f"coordinate {i + 1} out of range for a tensor with {T.order} coordinates"
        raise ShapeMismatch(msg)


def flatten(T: Tensor, coords: Iterable[int]) -> np.ndarray:
    """
    Return the flattening with rows indexed by ``coords``.

    Rows run over the first axis of each chosen coordinate in lexicographic
    order; columns run over every remaining axis.
    """
    chosen = sorted(set(coords))
    for i in chosen:
        _check_coordinate(T, i)
    row_axes = [T.block_axes(i)[0] for i in chosen]
    col_axes = [a for a in range(T.entries.ndim) if a not in row_axes]
    n_rows = math.prod(T.dims[i] for i in chosen)
    moved = np.transpose(T.entries, row_axes + col_axes)
    return np.array(moved.reshape(n_rows, -1), dtype=object)


def flatten_coordinate_block(T: Tensor, i: int) -> np.ndarray:
    """Return the flattening whose rows run over every axis of coordinate ``i``."""
    _check_coordinate(T, i)
    row_axes = list(T.block_axes(i))
    col_axes = [a for a in range(T.entries.ndim) if a not in row_axes]
    n_rows = T.dims[i] ** T.fmt[i]
    moved = np.transpose(T.entries, row_axes + col_axes)
    return np.array(moved.reshape(n_rows, -1), dtype=object)


def unflatten(
    matrix: np.ndarray,
    ring: Ring,
    dims: Sequence[int],
    coords: Iterable[int],
    fmt: Sequence[int] | None = None,
) -> Tensor:
    """Invert :func:`flatten` for the given dimensions and format."""
    fmt = tuple(fmt) if fmt is not None else (1,) * len(dims)
    shape = [n for n, nu in zip(dims, fmt, strict=True) for _ in range(nu)]
    starts = [sum(fmt[:i]) for i in range(len(dims))]
    row_axes = [starts[i] for i in sorted(set(coords))]
    col_axes = [a for a in range(len(shape)) if a not in row_axes]
    order = row_axes + col_axes
    moved_shape = [shape[a] for a in order]
    if matrix.size != math.prod(shape):
        msg = f"matrix of shape {matrix.shape} does not fit dims {tuple(dims)}"
        raise ShapeMismatch(msg)
    array = matrix.reshape(moved_shape)
    return Tensor(ring, np.transpose(array, np.argsort(order)), fmt)


def is_concise(T: Tensor, i: int) -> bool:
    """Return True if the coordinate-``i`` flattening has full row rank."""
    return linalg.rank(T.ring, flatten(T, [i])) == T.dims[i]


def concise_coordinates(T: Tensor) -> list[bool]:
    """Return the conciseness flag of every coordinate."""
    return [is_concise(T, i) for i in range(T.order)]


def is_fully_concise(T: Tensor) -> bool:
    """Return True if T is concise on every coordinate."""
    return all(concise_coordinates(T))


def _restriction_ring(T: Tensor, maps: Sequence[np.ndarray]) -> Ring:
    ring = T.ring
    for m in maps:
        if any(isinstance(x, SeriesElem) for x in m.flat):
            ring = common_ring(ring, SeriesField(ring.base))
    return ring


def restrict(T: Tensor, maps: Sequence[np.ndarray]) -> Tensor:
    """
    Return ``(maps[0] ⊗ ... ⊗ maps[d-1])(T)``.

    ``maps[i]`` has ``dims[i]`` columns; symmetric coordinates apply the same
    map to each of their axes.
    """
    if len(maps) != T.order:
        msg = f"expected {T.order} maps, got {len(maps)}"
        raise ShapeMismatch(msg)
    for i, m in enumerate(maps):
        if m.ndim != 2 or m.shape[1] != T.dims[i]:  # noqa: PLR2004
            msg = f"map {i + 1} has shape {m.shape}, expected (*, {T.dims[i]})"
            raise ShapeMismatch(msg)
        if m.shape[0] < 1:
            msg = f"map {i + 1} has no rows"
            raise ShapeMismatch(msg)
    ring = _restriction_ring(T, maps)
    array = T.entries if ring == T.ring else linalg.convert_array(ring, T.entries)
    for i, m in enumerate(maps):
        converted = linalg.convert_array(ring, m)
        for a in T.block_axes(i):
            array = np.moveaxis(np.tensordot(converted, array, axes=([1], [a])), 0, a)
    return Tensor(ring, array, T.fmt)


def map_tensor(T: Tensor, func: Callable[[Any], Any], ring: Ring) -> Tensor:
    """Apply a ring map entrywise."""
    return Tensor(ring, linalg.map_array(T.entries, func), T.fmt)


def limit_tensor(T: Tensor) -> Tensor:
    """Return the entrywise limit at ``t = 0`` over the base field."""
    if not T.ring.is_series:
        return T
    return map_tensor(T, T.ring.limit, T.ring.base)


def as_segre(T: Tensor) -> Tensor:
    """Forget the symmetry: every axis becomes its own coordinate."""
    return Tensor(T.ring, T.entries)


def contract(T: Tensor, axis: int, covector: np.ndarray) -> np.ndarray:
    """Contract one array axis with a covector and return the raw array."""
    return np.tensordot(T.entries, covector, axes=([axis], [0]))


def is_gl_equivalent_via(T1: Tensor, T2: Tensor, maps: Sequence[np.ndarray]) -> bool:
    """Return True if the maps are invertible and send T1 to T2."""
    if len(maps) != T1.order or T1.dims != T2.dims:
        return False
    for i, m in enumerate(maps):
        square = m.shape == (T1.dims[i], T1.dims[i])
        if not square or not linalg.is_invertible(T1.ring.base, m):
            return False
    return restrict(T1, maps) == T2


def joint_conciseness_space(tensors: Sequence[Tensor], i: int) -> list[np.ndarray]:
    """
    Return a basis of the smallest coordinate-``i`` subspace containing all tensors.

    An empty list spans the zero subspace.
    """
    if not tensors:
        return []
    dims = tensors[0].dims
    ring = tensors[0].ring
    for T in tensors[1:]:
        if T.dims != dims or T.fmt != tensors[0].fmt:
            msg = "tensors in a family must share dimensions and format"
            raise ShapeMismatch(msg)
        ring = common_ring(ring, T.ring)
    stacked = np.concatenate(
        [linalg.convert_array(ring, flatten(T, [i])) for T in tensors], axis=1
    )
    pivots = linalg.pivot_columns(ring, stacked)
    return [np.array(stacked[:, c], dtype=object) for c in pivots]


def is_jointly_concise(tensors: Sequence[Tensor], i: int) -> bool:
    """Return True if the joint span on coordinate ``i`` is everything."""
    if not tensors:
        return False
    return len(joint_conciseness_space(tensors, i)) == tensors[0].dims[i]


def exponent_of(index: Iterable[int], m: int) -> Monomial:
    """Return the exponent vector of a multi-index into ``m`` variables."""
    counts = Counter(index)
    return tuple(counts.get(k, 0) for k in range(m))


def multinomial(exponent: Monomial) -> int:
    """Return the number of distinct orderings of a multi-index."""
    total = math.factorial(sum(exponent))
    for e in exponent:
        total //= math.factorial(e)
    return total


def _indices_of(exponent: Monomial) -> set[tuple[int, ...]]:
    base = [k for k, e in enumerate(exponent) for _ in range(e)]
    return set(itertools.permutations(base))


def from_polynomial(
    ring: Ring,
    terms: Mapping[tuple[Monomial, ...], Any],
    dims: Sequence[int],
    fmt: Sequence[int],
) -> Tensor:
    """
    Embed a multihomogeneous polynomial as a partially symmetric tensor.

    Each coefficient is spread evenly over the index permutations of its
    monomial, which needs ``ν!`` to be invertible.
    """
    fmt = tuple(fmt)
    for nu in fmt:
        if not ring.base.supports_degree(nu):
            msg = f"symmetric degree {nu} needs characteristic 0 or above {nu}"
            raise UnsupportedField(msg)
    values: dict[tuple[int, ...], Any] = {}
    for key, coeff in terms.items():
        if len(key) != len(dims):
            msg = f"monomial {key} does not have {len(dims)} factors"
            raise ShapeMismatch(msg)
        per_block: list[list[tuple[int, ...]]] = []
        weight = 1
        for exponent, n, nu in zip(key, dims, fmt, strict=True):
            if len(exponent) != n or sum(exponent) != nu:
                msg = f"exponent {exponent} is not of degree {nu} in {n} variables"
                raise ShapeMismatch(msg)
            per_block.append(sorted(_indices_of(exponent)))
            weight *= multinomial(exponent)
        share = ring.convert(coeff) / ring.convert(weight)
        for parts in itertools.product(*per_block):
            index = tuple(k for part in parts for k in part)
            values[index] = values.get(index, ring.zero) + share
    return Tensor.from_entries(ring, dims, values, fmt)


def symmetric_from_polynomial(
    ring: Ring, coeffs: Mapping[Monomial, Any], m: int, nu: int
) -> Tensor:
    """Embed a form of degree ``nu`` in ``m`` variables into S^nu V."""
    return from_polynomial(ring, {(e,): c for e, c in coeffs.items()}, (m,), (nu,))


def polynomial_view(T: Tensor) -> dict[tuple[Monomial, ...], Any]:
    """Return the monomial coefficients of a partially symmetric tensor."""
    view: dict[tuple[Monomial, ...], Any] = {}
    for index, value in T.nonzero().items():
        key = tuple(
            exponent_of((index[a] for a in T.block_axes(i)), T.dims[i])
            for i in range(T.order)
        )
        if key in view:
            continue
        weight = math.prod(multinomial(e) for e in key)
        view[key] = value * T.ring.convert(weight)
    return view


def form_view(T: Tensor) -> dict[Monomial, Any]:
    """Return the coefficients of a single symmetric block as a form."""
    if T.order != 1:
        msg = f"expected one symmetric coordinate, got {T.order}"
        raise ShapeMismatch(msg)
    return {key[0]: value for key, value in polynomial_view(T).items()}


def _format_coefficient(ring: Ring, value: Any) -> str:
    text = ring.format(value)
    if any(op in text.lstrip("-") for op in "+-/ "):
        return f"({text})"
    return text


def render_linear_form(ring: Ring, coeffs: Sequence[Any]) -> str:
    """Render ``sum c_k x_{k+1}``."""
    parts: list[str] = []
    for k, c in enumerate(coeffs):
        if not c:
            continue
        variable = f"{PENCIL_VARIABLE}{k + 1}"
        if c == ring.one:
            parts.append(variable)
        elif c == -ring.one:
            parts.append(f"-{variable}")
        else:
            parts.append(f"{_format_coefficient(ring, c)}*{variable}")
    return " + ".join(parts).replace("+ -", "- ") or "0"


def render_pencil(T: Tensor) -> str:
    """
    Render a three-way tensor as a matrix of linear forms.

    Rows run over the second coordinate and columns over the third; entry
    ``(j, k)`` is ``sum_i T[i, j, k] x_{i+1}``.
    """
    if T.order != 3 or not T.is_segre:  # noqa: PLR2004
        msg = "pencil rendering needs a three-way tensor without symmetry"
        raise ShapeMismatch(msg)
    rows: list[str] = []
    for j in range(T.dims[1]):
        cells = [
            render_linear_form(T.ring, T.entries[:, j, k]) for k in range(T.dims[2])
        ]
        rows.append("[" + ", ".join(cells) + "]")
    return "\n".join(rows)
