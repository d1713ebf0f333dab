"""Tests for finite algebras, structure tensors and Gorenstein quotients."""

from __future__ import annotations

import random

import numpy as np
import pytest

from unrestrict import gallery, linalg
from unrestrict.algebra import (
    FiniteAlgebra,
    Functional,
    algebra_from_monomial_quotient,
    bilinear_form,
    dual_generator_isomorphism,
    evaluation_tensor,
    gorenstein_quotient,
    is_dual_generator,
    is_gorenstein,
    multiplication_tensor,
    multiplication_to_evaluation,
    product_algebra,
    split_algebra,
    truncated_polynomial_algebra,
    unit_tensor,
)
from unrestrict.exact import RATIONALS, ScalarField
from unrestrict.exceptions import PreconditionFailure, ShapeMismatch, UnsupportedSize
from unrestrict.tensor import restrict


def _text(vector: np.ndarray) -> list[str]:
    return [RATIONALS.format(x) for x in vector]


# Construction


def test_truncated_polynomial_algebra() -> None:
    A = truncated_polynomial_algebra(3)
    assert A.labels == ("1", "x", "x^2")
    x = A.basis_element(1)
    assert _text(A.multiply(x, x)) == ["0", "0", "1"]
    assert _text(A.power(x, 3)) == ["0", "0", "0"]
    assert A.is_local()
    assert A.nilradical_dimension() == 2


def test_inverse_element() -> None:
    A = truncated_polynomial_algebra(3)
    assert _text(A.inverse_element(A.element([1, 1, 0]))) == ["1", "-1", "1"]
    with pytest.raises(PreconditionFailure, match="not invertible"):
        A.inverse_element(A.basis_element(1))


def test_split_and_product_algebras() -> None:
    assert split_algebra(3).is_reduced()
    P = product_algebra(truncated_polynomial_algebra(2), split_algebra(1))
    assert P.dim == 3
    assert P.nilradical_dimension() == 1
    assert not P.is_local()
    assert P.labels == ("(1,0)", "(x,0)", "(0,u1)")
    with pytest.raises(ShapeMismatch, match="cannot multiply"):
        product_algebra(split_algebra(1), split_algebra(1, ScalarField(5)))


def test_nilradical_in_positive_characteristic() -> None:
    assert truncated_polynomial_algebra(4, ScalarField(2)).nilradical_dimension() == 3
    assert split_algebra(2, ScalarField(2)).is_reduced()


def test_structure_constants_are_checked() -> None:
    A = truncated_polynomial_algebra(2)
    with pytest.raises(PreconditionFailure, match="unit does not act"):
        FiniteAlgebra(RATIONALS, A.mult, [0, 1])
    skewed = np.array(A.mult, dtype=object, copy=True)
    skewed[0, 1, 0] = RATIONALS.one
    with pytest.raises(PreconditionFailure, match="not commutative"):
        FiniteAlgebra(RATIONALS, skewed, A.unit)
    with pytest.raises(ShapeMismatch, match="do not fit"):
        FiniteAlgebra(RATIONALS, A.mult, [1, 0, 0])


# Presentations


@pytest.mark.parametrize(
    ("text", "labels"),
    [
        ("k[x]/(x^3)", ("1", "x", "x^2")),
        ("k[x,y]/(x^2,xy,y^2)", ("1", "x", "y")),
        ("k[x,y]/((x,y)^2)", ("1", "x", "y")),
        ("k[x,y]/(x^2, xy, y^3)", ("1", "x", "y", "y^2")),
    ],
)
def test_monomial_presentations(text: str, labels: tuple[str, ...]) -> None:
    assert algebra_from_monomial_quotient(text).labels == labels


def test_presentation_errors() -> None:
    with pytest.raises(ValueError, match="cannot read the presentation"):
        algebra_from_monomial_quotient("x^2")
    with pytest.raises(ValueError, match="outside"):
        algebra_from_monomial_quotient("k[x]/(z^2)")
    with pytest.raises(PreconditionFailure, match="whole ring"):
        algebra_from_monomial_quotient("k[x]/(x, x + 1)")
    with pytest.raises(UnsupportedSize):
        algebra_from_monomial_quotient("k[x,y]/(x^2)")


# Structure tensors


def test_evaluation_tensor_of_the_split_algebra_is_the_unit_tensor() -> None:
    A = split_algebra(3)
    eps = Functional(RATIONALS, [1, 1, 1])
    assert evaluation_tensor(A, eps) == unit_tensor(3)
    assert len(unit_tensor(3, 4).nonzero()) == 3


def test_multiplication_restricts_to_evaluation() -> None:
    A = algebra_from_monomial_quotient("k[x,y]/(x^2 - y^2, xy)")
    eps = Functional.dual_basis(RATIONALS, A.dim, A.dim - 1)
    identity = linalg.identity(RATIONALS, A.dim)
    to_dual = multiplication_to_evaluation(A, eps)
    restricted = restrict(multiplication_tensor(A), [identity, identity, to_dual])
    assert restricted == evaluation_tensor(A, eps)


def test_functional_checks() -> None:
    with pytest.raises(ShapeMismatch, match="not a vector"):
        Functional(RATIONALS, [[1]])
    with pytest.raises(ShapeMismatch, match="does not fit"):
        evaluation_tensor(
            truncated_polynomial_algebra(3), Functional.dual_basis(RATIONALS, 2, 0)
        )
    with pytest.raises(ShapeMismatch, match="below 2"):
        multiplication_tensor(split_algebra(2), 1)


# Gorenstein algebras


def test_dual_generators(rng: random.Random) -> None:
    A = gallery.eps3_algebra()
    assert is_dual_generator(A, Functional.dual_basis(RATIONALS, 3, 2))
    assert not is_dual_generator(A, Functional.dual_basis(RATIONALS, 3, 1))
    witness = is_gorenstein(A, rng)
    assert witness is not None
    assert linalg.is_invertible(RATIONALS, bilinear_form(A, witness))
    assert is_gorenstein(gallery.non_gorenstein_algebra(), rng) is None


@pytest.mark.parametrize("k", [0, 1, 2])
def test_gorenstein_quotient_dimension(k: int) -> None:
    eps = Functional.dual_basis(RATIONALS, 3, k)
    quotient = gorenstein_quotient(gallery.eps3_algebra(), eps)
    assert quotient.algebra.dim == k + 1
    assert len(quotient.kernel) == 2 - k
    assert is_dual_generator(quotient.algebra, quotient.eps)


def test_gorenstein_quotient_of_zero_functional() -> None:
    with pytest.raises(PreconditionFailure, match="zero functional"):
        gorenstein_quotient(gallery.eps3_algebra(), Functional(RATIONALS, [0, 0, 0]))


def test_dual_generator_isomorphism() -> None:
    A = gallery.eps3_algebra()
    eps = Functional.dual_basis(RATIONALS, 3, 2)
    maps = dual_generator_isomorphism(A, eps, A.element([2, 1, 0]))
    assert len(maps) == 3
    assert all(linalg.is_invertible(RATIONALS, m) for m in maps)
    with pytest.raises(PreconditionFailure, match="not a unit"):
        dual_generator_isomorphism(A, eps, A.basis_element(1))
