"""Tests for tensors, flattenings, restrictions and symmetric embeddings."""

from __future__ import annotations

import numpy as np
import pytest

from unrestrict import linalg
from unrestrict.algebra import truncated_polynomial_algebra, multiplication_tensor
from unrestrict.exact import RATIONALS, ScalarField, SeriesField
from unrestrict.exceptions import ShapeMismatch, UnsupportedField
from unrestrict.gallery import order_matters_limits, pencil
from unrestrict.tensor import (
    Tensor,
    as_segre,
    concise_coordinates,
    flatten,
    form_view,
    is_fully_concise,
    is_gl_equivalent_via,
    is_jointly_concise,
    joint_conciseness_space,
    limit_tensor,
    polynomial_view,
    render_pencil,
    restrict,
    symmetric_from_polynomial,
    unflatten,
)


def _w_state() -> Tensor:
    """Return x⊗x⊗y + x⊗y⊗x + y⊗x⊗x."""
    values = {(0, 0, 1): 1, (0, 1, 0): 1, (1, 0, 0): 1}
    return Tensor.from_entries(RATIONALS, (2, 2, 2), values)


def test_shape_validation() -> None:
    with pytest.raises(ShapeMismatch, match="between 2 and"):
        Tensor(RATIONALS, linalg.zeros(RATIONALS, (3,)))
    with pytest.raises(ShapeMismatch, match="needs 3 axes"):
        Tensor(RATIONALS, linalg.zeros(RATIONALS, (2, 2)), (1, 2))
    with pytest.raises(ShapeMismatch, match="out of range"):
        Tensor.from_entries(RATIONALS, (2, 2), {(0, 2): 1})


def test_symmetric_block_must_be_symmetric() -> None:
    with pytest.raises(ShapeMismatch, match="not symmetric"):
        Tensor.from_entries(RATIONALS, (2,), {(0, 1): 1}, (2,))


def test_flattening_and_conciseness() -> None:
    T = _w_state()
    assert flatten(T, [0]).shape == (2, 4)
    assert flatten(T, [0, 2]).shape == (4, 2)
    assert concise_coordinates(T) == [True, True, True]
    padded = Tensor.from_entries(
        RATIONALS, (3, 2, 2), {(0, 0, 1): 1, (0, 1, 0): 1, (1, 0, 0): 1}
    )
    assert concise_coordinates(padded) == [False, True, True]
    assert not is_fully_concise(padded)


def test_unflatten_inverts_flatten() -> None:
    T = multiplication_tensor(truncated_polynomial_algebra(3))
    for coords in ([0], [1], [0, 2]):
        assert unflatten(flatten(T, coords), T.ring, T.dims, coords) == T


def test_restrict_by_identity_and_projection() -> None:
    T = _w_state()
    identity = [linalg.identity(RATIONALS, 2)] * 3
    assert restrict(T, identity) == T
    keep_x = linalg.as_matrix(RATIONALS, [[1, 0]])
    projected = restrict(T, [keep_x, keep_x, linalg.identity(RATIONALS, 2)])
    assert projected.dims == (1, 1, 2)
    assert projected.nonzero() == {(0, 0, 1): RATIONALS.one}
    with pytest.raises(ShapeMismatch, match="expected 3 maps"):
        restrict(T, identity[:2])


def test_restrict_with_series_maps_promotes_ring(qt: SeriesField) -> None:
    T = _w_state()
    scale = linalg.as_matrix(qt, [[qt.t, 0], [0, qt.t]])
    identity = linalg.identity(RATIONALS, 2)
    image = restrict(T, [scale, identity, identity])
    assert image.ring == qt
    assert limit_tensor(image) == Tensor.zeros(RATIONALS, (2, 2, 2))


def test_gl_equivalence_requires_invertible_maps() -> None:
    T = _w_state()
    swap = linalg.as_matrix(RATIONALS, [[0, 1], [1, 0]])
    image = restrict(T, [swap] * 3)
    assert is_gl_equivalent_via(T, image, [swap] * 3)
    singular = linalg.as_matrix(RATIONALS, [[1, 0], [0, 0]])
    assert not is_gl_equivalent_via(T, restrict(T, [singular] * 3), [singular] * 3)


def test_symmetric_embedding_spreads_coefficients() -> None:
    # x1^2 x2 has three orderings
    S = symmetric_from_polynomial(RATIONALS, {(2, 1): 3}, 2, 3)
    assert S.fmt == (3,)
    assert {i: RATIONALS.format(v) for i, v in S.nonzero().items()} == {
        (0, 0, 1): "1",
        (0, 1, 0): "1",
        (1, 0, 0): "1",
    }
    assert form_view(S) == {(2, 1): RATIONALS.convert(3)}
    assert as_segre(S).fmt == (1, 1, 1)


def test_symmetric_embedding_needs_invertible_factorial() -> None:
    with pytest.raises(UnsupportedField, match="degree 3"):
        symmetric_from_polynomial(ScalarField(3), {(3,): 1}, 1, 3)


def test_polynomial_view_of_partial_symmetry() -> None:
    # x1 x2 ⊗ y1 in S^2 k^2 ⊗ k^2
    T = Tensor.from_entries(RATIONALS, (2, 2), {(0, 1, 0): 1, (1, 0, 0): 1}, (2, 1))
    assert polynomial_view(T) == {((1, 1), (1, 0)): RATIONALS.convert(2)}


def test_render_pencil() -> None:
    columns_first, rows_first = order_matters_limits()
    assert render_pencil(columns_first) == "[x1, x2]\n[x2, x1]"
    assert render_pencil(rows_first) == "[x1, 0]\n[x2, x1]"
    assert render_pencil(pencil([["x1 - 2*x2"]], 2)) == "[x1 - 2*x2]"


def test_joint_conciseness() -> None:
    e1 = Tensor.from_entries(RATIONALS, (2, 2), {(0, 0): 1})
    e2 = Tensor.from_entries(RATIONALS, (2, 2), {(1, 1): 1})
    assert len(joint_conciseness_space([e1], 0)) == 1
    assert is_jointly_concise([e1, e2], 0)
    assert not is_jointly_concise([], 0)
    with pytest.raises(ShapeMismatch, match="share dimensions"):
        joint_conciseness_space([e1, Tensor.zeros(RATIONALS, (3, 2))], 0)


def test_equality_compares_format() -> None:
    entries = np.array(symmetric_from_polynomial(RATIONALS, {(1, 1): 2}, 2, 2).entries)
    assert Tensor(RATIONALS, entries, (2,)) != Tensor(RATIONALS, entries)
