"""Tests for symmetric and partially symmetric unrestriction."""

from __future__ import annotations

import pytest

from unrestrict import gallery
from unrestrict.exact import RATIONALS, ScalarField, SeriesField
from unrestrict.exceptions import (
    NegativeValuation,
    NotJointlyConcise,
    PreconditionFailure,
    ShapeMismatch,
    UnsupportedField,
)
from unrestrict.segre import Degeneration
from unrestrict.tensor import (
    Tensor,
    is_fully_concise,
    restrict,
    symmetric_from_polynomial,
)
from unrestrict.veronese import (
    PolyFamily,
    concise_space,
    jointly_concise_rank,
    monomials,
    partial_derivative,
    unrestrict_family,
    unrestrict_partial,
    unrestrict_symmetric,
)


def test_monomials_descend_lexicographically() -> None:
    assert monomials(2, 2) == [(2, 0), (1, 1), (0, 2)]
    assert len(monomials(4, 3)) == 20


def test_partial_derivative() -> None:
    form = {(2, 1): RATIONALS.convert(3), (0, 3): RATIONALS.one}
    assert partial_derivative(form, 0) == {(1, 1): RATIONALS.convert(6)}
    three = RATIONALS.convert(3)
    assert partial_derivative(form, 1) == {(2, 0): three, (0, 2): three}


def test_concise_space_of_a_coordinate_form() -> None:
    basis = concise_space(RATIONALS, [gallery.form("x1*x2", 3)], 3, 2)
    rows = [[RATIONALS.format(x) for x in v] for v in basis]
    assert rows == [["1", "0", "0"], ["0", "1", "0"]]


# Families


def test_family_validation(qt: SeriesField) -> None:
    with pytest.raises(UnsupportedField, match="degree 3"):
        PolyFamily(ScalarField(3), 2, 3, ({(3, 0): 1},))
    with pytest.raises(NegativeValuation):
        PolyFamily(RATIONALS, 2, 2, ({(2, 0): qt.one / qt.t},))
    with pytest.raises(ShapeMismatch, match="not of degree 2"):
        PolyFamily(RATIONALS, 2, 2, ({(1, 0): 1},))


def test_jointly_concise_rank_counts_general_members() -> None:
    # x1^2 and x2^2 separately miss a variable but are jointly concise
    members = (gallery.form("x1^2", 2), gallery.form("x2^2", 2))
    family = PolyFamily(RATIONALS, 2, 2, members)
    assert jointly_concise_rank(family) == 2
    result = unrestrict_family(family)
    assert result.steps == ()
    assert result.exp_denominator == 1


# Single forms


def test_small_cw_unrestricts_to_the_expected_cubic() -> None:
    result = unrestrict_symmetric(gallery.small_cw_degeneration(), 4, 3, RATIONALS)
    assert result.limit == gallery.small_cw_limit()
    assert result.exp_denominator == 1
    assert result.steps
    assert is_fully_concise(result.limit_tensor())


def test_unperturbed_witness_is_not_concise() -> None:
    with pytest.raises(NotJointlyConcise, match="not jointly concise in 4"):
        unrestrict_symmetric(
            gallery.small_cw_degeneration(perturbed=False), 4, 3, RATIONALS
        )


def test_zero_form_rejected() -> None:
    with pytest.raises(NotJointlyConcise, match="zero form"):
        unrestrict_symmetric({}, 2, 2, RATIONALS)


def test_vanishing_limit_is_rescaled() -> None:
    result = unrestrict_symmetric(gallery.form("t*x1^2 + t*x2^2", 2), 2, 2, RATIONALS)
    assert result.scale.valuation() == 1
    assert result.limit == gallery.form("x1^2 + x2^2", 2)


def test_fractional_weight_needs_a_cube_root() -> None:
    result = unrestrict_symmetric(gallery.form("x1^3 + t*x2^3", 2), 2, 3, RATIONALS)
    assert result.limit == gallery.form("x1^3 + x2^3", 2)
    assert result.exp_denominator == 3
    assert is_fully_concise(result.limit_tensor())


# Partially symmetric tensors


def test_partial_on_a_single_symmetric_block(qt: SeriesField) -> None:
    form = gallery.small_cw_degeneration()
    D = Degeneration(symmetric_from_polynomial(qt, form, 4, 3))
    cert = unrestrict_partial(D)
    assert cert.limit == gallery.small_cw_tensor()
    assert cert.order == (0,)


def test_partial_on_a_segre_tensor() -> None:
    D = gallery.order_matters()
    cert = unrestrict_partial(D)
    assert is_fully_concise(cert.limit)
    assert restrict(cert.unrestriction.tensor, cert.maps_t) == D.tensor


def test_partial_with_a_square_and_a_linear_block(qt: SeriesField) -> None:
    # (x1 + t x2)^2 ⊗ y1 + t x2^2 ⊗ y2 in S^2(k^2) ⊗ k^2
    values = {
        (0, 0, 0): 1,
        (0, 1, 0): qt.t,
        (1, 0, 0): qt.t,
        (1, 1, 0): qt.t**2,
        (1, 1, 1): qt.t,
    }
    D = Degeneration(Tensor.from_entries(qt, (2, 2), values, (2, 1)))
    cert = unrestrict_partial(D)
    assert cert.restriction_identity_holds()
    assert cert.exp_denominator == 2
    expected = {(0, 0, 0): 1, (1, 1, 1): 1}
    assert cert.limit == Tensor.from_entries(RATIONALS, (2, 2), expected, (2, 1))
    assert is_fully_concise(cert.limit)


def test_partial_order_must_be_a_permutation() -> None:
    with pytest.raises(PreconditionFailure, match="not a permutation"):
        unrestrict_partial(gallery.order_matters(), (1, 1, 0))
