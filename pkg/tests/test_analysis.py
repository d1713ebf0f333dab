"""Tests for centroids, 1-genericity, regularity and cactus certificates."""

from __future__ import annotations

import random

import pytest

from unrestrict import gallery, linalg
from unrestrict.algebra import (
    Functional,
    evaluation_tensor,
    multiplication_tensor,
    truncated_polynomial_algebra,
    unit_tensor,
)
from unrestrict.analysis import (
    VERDICT_DECIDED,
    VERDICT_NECESSARY_ONLY,
    CactusCertificate,
    analyze,
    build_cactus_tensor,
    centroid,
    concise_secant_dimension,
    generated_subalgebra,
    is_jointly_spanning,
    is_minimal_border_rank,
    is_one_generic_on,
    is_regular,
    linear_span,
    minimal_border_rank_verdict,
    partial_restriction_conciseness,
    recover_structure,
    shrink_certificate,
    verify_cactus_certificate,
)
from unrestrict.exact import RATIONALS, ScalarField, SeriesField
from unrestrict.exceptions import (
    NotConcise,
    NotRegular,
    PreconditionFailure,
    ShapeMismatch,
    UnsupportedField,
    UnsupportedSize,
)
from unrestrict.tensor import Tensor


def _w_state() -> Tensor:
    eps = Functional.dual_basis(RATIONALS, 2, 1)
    return evaluation_tensor(truncated_polynomial_algebra(2), eps)


def _eps3_evaluation() -> Tensor:
    return evaluation_tensor(gallery.eps3_algebra(), gallery.eps3_dual_generator())


def _row(m: int, k: int) -> list[list[int]]:
    return [[int(j == k) for j in range(m)]]


# Centroids


@pytest.mark.parametrize(
    ("T", "dim", "nilpotent"),
    [
        (unit_tensor(3), 3, False),
        (_w_state(), 2, True),
        (multiplication_tensor(gallery.eps3_algebra()), 3, True),
    ],
)
def test_centroid_of_structure_tensors(
    T: Tensor,
    dim: int,
    nilpotent: bool,  # noqa: FBT001
) -> None:
    cen = centroid(T)
    assert cen.dim == dim
    assert cen.is_abundant
    assert cen.is_nilpotent is nilpotent
    identity = linalg.identity(RATIONALS, T.dims[1])
    assert linalg.arrays_equal(cen.component(cen.algebra.unit, 1), identity)


def test_centroid_preconditions(qt: SeriesField) -> None:
    with pytest.raises(PreconditionFailure, match="take the limit"):
        centroid(_w_state().with_ring(qt))
    with pytest.raises(PreconditionFailure, match="at least 3"):
        centroid(Tensor.from_entries(RATIONALS, (2, 2), {(0, 0): 1, (1, 1): 1}))
    with pytest.raises(ShapeMismatch, match="not all equal"):
        centroid(Tensor.zeros(RATIONALS, (2, 2, 3)))
    padded = Tensor.from_entries(RATIONALS, (2, 2, 2), {(0, 0, 0): 1})
    with pytest.raises(NotConcise, match=r"coordinates \[1, 2, 3\]"):
        centroid(padded)


def test_minimal_border_rank_decision() -> None:
    assert is_minimal_border_rank(_w_state())
    assert is_minimal_border_rank(_eps3_evaluation())
    verdict = minimal_border_rank_verdict(unit_tensor(3))
    assert verdict.status == VERDICT_DECIDED
    assert verdict.minimal is True


def test_minimal_border_rank_limits() -> None:
    with pytest.raises(UnsupportedField, match="characteristic zero"):
        is_minimal_border_rank(unit_tensor(2, field_=ScalarField(5)))
    with pytest.raises(UnsupportedSize, match="m = 6"):
        is_minimal_border_rank(unit_tensor(6))
    verdict = minimal_border_rank_verdict(unit_tensor(6))
    assert verdict.status == VERDICT_NECESSARY_ONLY
    assert verdict.abundant
    assert verdict.minimal is None


# 1-genericity and structure recovery


def test_one_genericity_of_a_non_gorenstein_algebra(rng: random.Random) -> None:
    M = multiplication_tensor(gallery.non_gorenstein_algebra())
    assert [is_one_generic_on(M, i, rng) for i in range(3)] == [True, True, False]


def test_recover_local_structure(rng: random.Random) -> None:
    recovered = recover_structure(_eps3_evaluation(), rng)
    assert recovered.algebra.dim == 3
    assert recovered.algebra.is_local()
    assert len(recovered.isomorphisms) == 3


def test_recover_split_structure(rng: random.Random) -> None:
    recovered = recover_structure(unit_tensor(3), rng)
    assert recovered.algebra.is_reduced()


# Regular restrictions


def test_regularity() -> None:
    A = gallery.joint_surjectivity_algebra()
    phi = gallery.joint_surjectivity_map()
    assert is_regular(phi, A)
    assert not is_regular(linalg.as_matrix(RATIONALS, _row(5, 1)), A)
    assert not is_jointly_spanning([phi] * 3, A)
    identity = linalg.identity(RATIONALS, 5)
    assert is_jointly_spanning([identity] * 3, A)


def test_partial_restriction_loses_conciseness() -> None:
    A = gallery.joint_surjectivity_algebra()
    phi = gallery.joint_surjectivity_map()
    T = evaluation_tensor(A, Functional.dual_basis(RATIONALS, 5, 4), 4)
    assert partial_restriction_conciseness(T, {1: phi, 2: phi, 3: phi}) == {0: False}
    assert partial_restriction_conciseness(T, {1: phi}) == {0: True, 2: True, 3: True}


def test_map_shape_is_checked() -> None:
    with pytest.raises(ShapeMismatch, match="3-dimensional dual"):
        is_regular(linalg.identity(RATIONALS, 2), gallery.eps3_algebra())


# Cactus certificates


def _identity_certificate() -> CactusCertificate:
    identity = linalg.identity(RATIONALS, 3)
    eps = gallery.eps3_dual_generator()
    return CactusCertificate(gallery.eps3_algebra(), eps, (identity,) * 3)


def test_cactus_certificate_round_trip() -> None:
    cert = _identity_certificate()
    assert cert.rank_bound == 3
    assert build_cactus_tensor(cert) == _eps3_evaluation()
    assert verify_cactus_certificate(_eps3_evaluation(), cert)
    assert not verify_cactus_certificate(unit_tensor(3), cert)


def test_non_regular_map_is_named() -> None:
    cert = _identity_certificate()
    bad = linalg.as_matrix(RATIONALS, _row(3, 1))
    maps = (cert.maps[0], bad, cert.maps[2])
    broken = CactusCertificate(cert.algebra, cert.eps, maps)
    with pytest.raises(NotRegular) as err:
        verify_cactus_certificate(build_cactus_tensor(broken), broken)
    assert err.value.coordinate == 1


def test_shrinking_keeps_the_tensor() -> None:
    A = truncated_polynomial_algebra(5)
    phi = linalg.as_matrix(RATIONALS, [[1, 0, 0, 0, 0], [0, 0, 1, 0, 0]])
    cert = CactusCertificate(A, Functional.dual_basis(RATIONALS, 5, 4), (phi,) * 3)
    assert generated_subalgebra(A, [phi]).algebra.dim == 3
    shrunk = shrink_certificate(cert)
    assert shrunk.rank_bound == 3
    assert build_cactus_tensor(shrunk) == build_cactus_tensor(cert)


def test_linear_span() -> None:
    A = gallery.eps3_algebra()
    assert len(linear_span(A, [linalg.identity(RATIONALS, 3)] * 3)) == 3
    unit_only = linalg.as_matrix(RATIONALS, _row(3, 0))
    assert len(linear_span(A, [unit_only] * 3)) == 1


def test_concise_secant_dimension() -> None:
    assert concise_secant_dimension(2, [2, 2, 2]) == 7
    assert concise_secant_dimension(2, [2, 2, 2], affine=True) == 8


# Reports


def test_analyze_report(rng: random.Random) -> None:
    report = analyze(_w_state(), rng)
    assert report["concise"] == [True, True, True]
    assert report["flattening_ranks"] == [2, 2, 2]
    assert report["centroid_dim"] == 2
    assert report["centroid_nilpotent"] is True
    assert report["minimal_border_rank"] is True
    assert report["one_generic"] == [True, True, True]
    assert report["recovered_algebra"]["local"] is True


def test_analyze_stops_before_the_centroid(rng: random.Random) -> None:
    report = analyze(Tensor.from_entries(RATIONALS, (2, 2, 2), {(0, 0, 0): 1}), rng)
    assert report["concise"] == [False, False, False]
    assert report["centroid_dim"] is None
