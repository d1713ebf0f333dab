"""Randomized invariants of the unrestriction and algebra routines."""

from __future__ import annotations

import random

import numpy as np
import pytest

from unrestrict import linalg
from unrestrict.algebra import (
    FiniteAlgebra,
    algebra_from_monomial_quotient,
    dual_generator_isomorphism,
    evaluation_tensor,
    is_gorenstein,
    multiplication_tensor,
    product_algebra,
    split_algebra,
    truncated_polynomial_algebra,
    unit_tensor,
)
from unrestrict.analysis import (
    centroid,
    is_jointly_spanning,
    is_regular,
    minimal_border_rank_verdict,
    partial_restriction_conciseness,
)
from unrestrict.exact import RATIONALS, SeriesField
from unrestrict.segre import (
    Degeneration,
    MinorChoice,
    check_gl_equivalence,
    unrestrict_full,
)
from unrestrict.tensor import Tensor, is_fully_concise, restrict

QT = SeriesField(RATIONALS)


def _unimodular(rng: random.Random, n: int) -> np.ndarray:
    lower = [
        [1 if r == c else (rng.randint(-2, 2) if r > c else 0) for c in range(n)]
        for r in range(n)
    ]
    upper = [
        [1 if r == c else (rng.randint(-2, 2) if r < c else 0) for c in range(n)]
        for r in range(n)
    ]
    return linalg.matmul(
        RATIONALS,
        linalg.as_matrix(RATIONALS, lower),
        linalg.as_matrix(RATIONALS, upper),
    )


def _degenerating_map(rng: random.Random, n: int) -> np.ndarray:
    scaling = linalg.as_matrix(
        QT,
        [
            [QT.t ** rng.randint(0, 3) if r == c else 0 for c in range(n)]
            for r in range(n)
        ],
    )
    return linalg.matmul(QT, scaling, linalg.convert_array(QT, _unimodular(rng, n)))


def _concise_seed(rng: random.Random, n: int, d: int) -> Tensor:
    if rng.random() < 0.5:  # noqa: PLR2004
        return unit_tensor(n, d)
    return multiplication_tensor(truncated_polynomial_algebra(n), d)


def _random_degeneration(seed: int) -> Degeneration:
    """Return a concise tensor moved by maps that degenerate at t = 0."""
    rng = random.Random(seed)
    n = rng.randint(2, 4)
    d = rng.randint(2, 4) if n == 2 else rng.randint(2, 3)  # noqa: PLR2004
    seed_tensor = _concise_seed(rng, n, d)
    maps = [_degenerating_map(rng, n) for _ in range(d)]
    return Degeneration(restrict(seed_tensor, maps))


def _random_algebra(rng: random.Random) -> FiniteAlgebra:
    choices = [
        lambda: truncated_polynomial_algebra(rng.randint(1, 4)),
        lambda: split_algebra(rng.randint(1, 3)),
        lambda: product_algebra(
            truncated_polynomial_algebra(2),
            truncated_polynomial_algebra(rng.randint(1, 3)),
        ),
        lambda: algebra_from_monomial_quotient("k[x,y]/(x^2, y^2)"),
        lambda: algebra_from_monomial_quotient("k[x,y]/(x^2, xy, y^3)"),
    ]
    return rng.choice(choices)()


def _random_map(rng: random.Random, A: FiniteAlgebra) -> np.ndarray:
    rows = rng.randint(1, A.dim)
    entries = [[rng.randint(-1, 1) for _ in range(A.dim)] for _ in range(rows)]
    return linalg.as_matrix(A.field, entries)


# Unrestriction


@pytest.mark.parametrize("seed", range(40))
def test_random_degenerations_unrestrict(seed: int) -> None:
    D = _random_degeneration(seed)
    cert = unrestrict_full(D)
    assert cert.restriction_identity_holds()
    assert is_fully_concise(cert.limit)
    assert restrict(cert.limit, list(cert.maps_limit)) == D.limit()
    map_entries = (x for phi in cert.maps_t for x in linalg.series_entries(phi))
    assert all(x.valuation() >= 0 for x in map_entries)
    assert all(x.valuation() >= 0 for x in cert.unrestriction.tensor.nonzero().values())
    if cert.limit.order == 3:  # noqa: PLR2004
        assert minimal_border_rank_verdict(cert.limit).abundant


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(40, 240))
def test_many_random_degenerations(seed: int) -> None:
    cert = unrestrict_full(_random_degeneration(seed))
    assert cert.restriction_identity_holds()
    assert is_fully_concise(cert.limit)


@pytest.mark.parametrize("seed", range(20))
def test_alternate_minor_choice_gives_an_isomorphic_limit(seed: int) -> None:
    D = _random_degeneration(seed)
    first = unrestrict_full(D)
    second = unrestrict_full(D, choice=MinorChoice.LEX_LARGEST)
    psis = check_gl_equivalence(first, second)
    assert psis is not None
    assert restrict(first.limit, psis) == second.limit


# Algebras


@pytest.mark.parametrize("seed", range(20))
def test_dual_generator_rescaling(seed: int) -> None:
    rng = random.Random(seed)
    A = product_algebra(
        truncated_polynomial_algebra(rng.randint(1, 3)),
        truncated_polynomial_algebra(rng.randint(1, 2)),
    )
    eps = is_gorenstein(A, rng)
    assert eps is not None
    while True:
        u = A.element([rng.randint(-3, 3) for _ in range(A.dim)])
        if A.is_unit_element(u):
            break
    maps = dual_generator_isomorphism(A, eps, u)
    rescaled = evaluation_tensor(A, eps.scaled_by(A, u))
    assert restrict(evaluation_tensor(A, eps), maps) == rescaled
    assert all(linalg.is_invertible(A.field, phi) for phi in maps)


@pytest.mark.parametrize("seed", range(50))
def test_regularity_implications(seed: int) -> None:
    rng = random.Random(seed)
    A = _random_algebra(rng)
    phis = [_random_map(rng, A) for _ in range(rng.randint(1, 3))]
    if is_jointly_spanning(phis, A):
        assert all(is_regular(phi, A) for phi in phis)
        extra = _random_map(rng, A)
        if is_regular(extra, A):
            assert is_jointly_spanning([*phis, extra], A)


@pytest.mark.parametrize("seed", range(10))
def test_centroid_dimension_survives_a_change_of_basis(seed: int) -> None:
    rng = random.Random(seed)
    n = rng.randint(2, 4)
    A = truncated_polynomial_algebra(n)
    T = multiplication_tensor(A) if seed % 2 else unit_tensor(n)
    twisted = restrict(T, [_unimodular(rng, n) for _ in range(3)])
    before, after = centroid(T), centroid(twisted)
    assert before.dim == after.dim
    assert before.is_nilpotent == after.is_nilpotent


@pytest.mark.parametrize("seed", range(30))
def test_jointly_spanning_restriction_keeps_the_rest_concise(seed: int) -> None:
    rng = random.Random(seed)
    A = _random_algebra(rng)
    eps = is_gorenstein(A, rng)
    while eps is None:
        A = _random_algebra(rng)
        eps = is_gorenstein(A, rng)
    d = rng.randint(3, 4)
    T = evaluation_tensor(A, eps, d)
    touched = rng.sample(range(d), rng.randint(1, d - 1))
    phis = [_random_map(rng, A) for _ in touched]
    while not is_jointly_spanning(phis, A):
        phis = [_random_map(rng, A) for _ in touched]
    flags = partial_restriction_conciseness(T, dict(zip(touched, phis, strict=True)))
    assert set(flags) == set(range(d)) - set(touched)
    assert all(flags.values())
