"""
Unrestriction of Segre-format degenerations.

One step works on a single coordinate: among the maximal minors of the
coordinate flattening it picks one of minimal valuation, and Cramer's rule
turns the flattening into ``X · N`` with ``N`` regular at ``t = 0`` and equal
to the identity on the chosen columns. Running the step once per coordinate
yields a concise limit together with the maps that restrict it back to the
input.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from enum import StrEnum
from fractions import Fraction
from typing import TYPE_CHECKING, Any

import numpy as np

from . import linalg
from .const import (
    MAX_BASIS_ROUNDS,
    MINOR_CHOICE_LEX_LARGEST,
    MINOR_CHOICE_LEX_SMALLEST,
)
from .exact import SeriesElem, SeriesField
from .exceptions import (
    InputMismatch,
    NegativeValuation,
    NotGenericallyConcise,
    PreconditionFailure,
)
from .tensor import Tensor, flatten, is_concise, limit_tensor, restrict, unflatten

if TYPE_CHECKING:
    from collections.abc import Sequence

_LOGGER = logging.getLogger(__name__)

CLAIM_UNKNOWN = "unknown"
CLAIM_MINIMAL = "minimal"
CLAIM_NOT_MINIMAL = "not-minimal"


class MinorChoice(StrEnum):
    """Tie-breaking rule among minors of equal minimal valuation."""

    LEX_SMALLEST = MINOR_CHOICE_LEX_SMALLEST
    LEX_LARGEST = MINOR_CHOICE_LEX_LARGEST


@dataclass(frozen=True, slots=True)
class Degeneration:
    """A tensor over the series field whose entries all lie in k[[t]]."""

    tensor: Tensor

    def __post_init__(self) -> None:
        """Convert scalar input and check that every entry has a limit."""
        if not self.tensor.ring.is_series:
            object.__setattr__(
                self,
                "tensor",
                self.tensor.with_ring(SeriesField(self.tensor.ring.base)),
            )
        for index, value in self.tensor.nonzero().items():
            if value.valuation() < 0:
                msg = f"entry {index} = {value} has negative valuation"
                raise NegativeValuation(msg)

    @property
    def dims(self) -> tuple[int, ...]:
        """Return the coordinate dimensions."""
        return self.tensor.dims

    @property
    def ring(self) -> SeriesField:
        """Return the series field."""
        return self.tensor.ring  # type: ignore[return-value]

    def limit(self) -> Tensor:
        """Return the tensor at ``t = 0``."""
        return limit_tensor(self.tensor)


@dataclass(frozen=True, slots=True, eq=False)
class SegreStep:
    """Outcome of one single-coordinate step."""

    degeneration: Degeneration
    map_t: np.ndarray
    columns: tuple[int, ...]
    exchanges: int = 0


@dataclass(frozen=True, slots=True, eq=False)
class UnrestrictionCertificate:
    """
    A concise unrestriction together with everything needed to re-check it.

    ``restrict(unrestriction.tensor, maps_t)`` equals ``source.tensor`` over
    k(t); ``limit`` and ``maps_limit`` are the values at ``t = 0``.
    """

    source: Degeneration
    order: tuple[int, ...]
    unrestriction: Degeneration
    maps_t: tuple[np.ndarray, ...]
    limit: Tensor
    maps_limit: tuple[np.ndarray, ...]
    minor_choices: tuple[tuple[int, ...], ...]
    choice: MinorChoice = MinorChoice.LEX_SMALLEST
    scale: SeriesElem | None = None
    exp_denominator: int = 1
    minimal_border_rank_claim: str = CLAIM_UNKNOWN
    notes: tuple[str, ...] = field(default=())

    def restriction_identity_holds(self) -> bool:
        """Re-check that the maps send the unrestriction back to the source."""
        image = restrict(self.unrestriction.tensor, self.maps_t)
        if self.scale is not None:
            image = Tensor(image.ring, image.entries * self.scale, image.fmt)
        return image == self.source.tensor

    def with_claim(self, claim: str) -> UnrestrictionCertificate:
        """Return a copy recording a border rank claim."""
        return replace(self, minimal_border_rank_claim=claim)


def _negative_entry(p: np.ndarray) -> tuple[int, int] | None:
    best: tuple[Fraction, int, int] | None = None
    for (r, c), value in np.ndenumerate(p):
        if not value:
            continue
        v = value.valuation()
        if v < 0 and (best is None or (v, c, r) < best):
            best = (v, c, r)
    if best is None:
        return None
    return best[2], best[1]


def minimal_valuation_basis(
    ring: SeriesField, matrix: np.ndarray, coordinate: int
) -> tuple[list[int], int]:
    """
    Return columns whose maximal minor has minimal valuation.

    Starting from the fraction-free pivot columns, a column of ``X_B^{-1} M``
    with a negative-valuation entry is swapped in until every entry is
    regular. For valuated matroids such a local optimum is global.
    """
    m = matrix.shape[0]
    basis = linalg.pivot_columns(ring, matrix)
    if len(basis) < m:
        raise NotGenericallyConcise(coordinate)
    for rounds in range(MAX_BASIS_ROUNDS):
        reduced = linalg.solve(ring, matrix[:, basis], matrix)
        if reduced is None:
            msg = "chosen columns are not a basis"
            raise AssertionError(msg)
        swap = _negative_entry(reduced)
        if swap is None:
            return basis, rounds
        r, c = swap
        _LOGGER.debug(
            "Coordinate %d: exchanging column %d for %d (valuation %s)",
            coordinate + 1,
            basis[r],
            c,
            reduced[r, c].valuation(),
        )
        basis[r] = c
    msg = f"minor search on coordinate {coordinate + 1} did not settle"
    raise NotGenericallyConcise(coordinate, msg)


def _choose_columns(
    ring: SeriesField, matrix: np.ndarray, basis: list[int], choice: MinorChoice
) -> tuple[int, ...]:
    """Pick the lex-smallest or lex-largest minimal-valuation column set."""
    reduced = linalg.solve(ring, matrix[:, basis], matrix)
    limit = linalg.limit_matrix(ring, reduced)
    base = ring.base
    if choice is MinorChoice.LEX_SMALLEST:
        return tuple(linalg.pivot_columns(base, limit))
    n = limit.shape[1]
    reversed_pivots = linalg.pivot_columns(base, limit[:, ::-1])
    return tuple(sorted(n - 1 - c for c in reversed_pivots))


def unrestrict_step(
    D: Degeneration, i: int, choice: MinorChoice = MinorChoice.LEX_SMALLEST
) -> SegreStep:
    """
    Run the single-coordinate step on coordinate ``i``.

    The returned map ``φ`` satisfies ``φ · flatten(D', i) = flatten(D, i)``,
    the new flattening is regular at ``t = 0`` with the identity on the chosen
    columns, and the limit of ``D'`` is concise on ``i``.
    """
    ring = D.ring
    T = D.tensor
    if not T.is_segre:
        msg = "the Segre step needs a tensor without symmetric coordinates"
        raise PreconditionFailure(msg)
    matrix = flatten(T, [i])
    basis, exchanges = minimal_valuation_basis(ring, matrix, i)
    columns = _choose_columns(ring, matrix, basis, choice)
    x = np.array(matrix[:, list(columns)], dtype=object)
    reduced = linalg.solve(ring, x, matrix)
    if reduced is None:
        msg = "minimal-valuation minor is singular"
        raise AssertionError(msg)
    _LOGGER.debug("Coordinate %d: minor on columns %s", i + 1, columns)
    step = Degeneration(unflatten(reduced, ring, T.dims, [i]))
    return SegreStep(step, x, columns, exchanges)


def _check_order(order: Sequence[int], d: int) -> tuple[int, ...]:
    result = tuple(order)
    if sorted(result) != list(range(d)):
        msg = f"order {[k + 1 for k in result]} is not a permutation of 1..{d}"
        raise PreconditionFailure(msg)
    return result


def unrestrict_full(
    D: Degeneration,
    order: Sequence[int] | None = None,
    choice: MinorChoice = MinorChoice.LEX_SMALLEST,
) -> UnrestrictionCertificate:
    """Run the step on every coordinate in ``order`` and certify the result."""
    T = D.tensor
    order = _check_order(order if order is not None else range(T.order), T.order)
    for i in range(T.order):
        if not is_concise(T, i):
            raise NotGenericallyConcise(i)
    current = D
    maps: list[Any] = [linalg.identity(D.ring, n) for n in T.dims]
    choices: list[tuple[int, ...]] = [() for _ in T.dims]
    for i in order:
        step = unrestrict_step(current, i, choice)
        maps[i] = step.map_t
        choices[i] = step.columns
        current = step.degeneration
    limit = current.limit()
    maps_limit = tuple(linalg.limit_matrix(D.ring, m) for m in maps)
    _LOGGER.info(
        "Unrestricted %s tensor along order %s", T.dims, [k + 1 for k in order]
    )
    return UnrestrictionCertificate(
        source=D,
        order=order,
        unrestriction=current,
        maps_t=tuple(maps),
        limit=limit,
        maps_limit=maps_limit,
        minor_choices=tuple(choices),
        choice=choice,
    )


def check_gl_equivalence(
    c1: UnrestrictionCertificate, c2: UnrestrictionCertificate
) -> list[np.ndarray] | None:
    """
    Return maps ``ψ`` with ``ψ(limit₁) = limit₂`` and ``maps_limit₂ ψ = maps_limit₁``.

    The maps are the limits of ``(φ₂)⁻¹ φ₁`` over k(t). None is returned, with
    a logged diagnostic, if some composed map has no invertible limit.
    """
    if c1.order != c2.order:
        msg = "certificates were produced along different coordinate orders"
        raise InputMismatch(msg)
    if c1.source.tensor != c2.source.tensor:
        msg = "certificates stem from different degenerations"
        raise InputMismatch(msg)
    ring = c1.source.ring
    base = ring.base
    psis: list[np.ndarray] = []
    for i, (phi1, phi2) in enumerate(zip(c1.maps_t, c2.maps_t, strict=True)):
        composed = linalg.matmul(ring, linalg.inverse(ring, phi2), phi1)
        negative = [x for x in linalg.series_entries(composed) if x.valuation() < 0]
        if negative:
            _LOGGER.info(
                "Coordinate %d: composed map has an entry of valuation %s",
                i + 1,
                min(x.valuation() for x in negative),
            )
            return None
        psi = linalg.limit_matrix(ring, composed)
        if not linalg.is_invertible(base, psi):
            _LOGGER.info("Coordinate %d: composed map degenerates at t = 0", i + 1)
            return None
        psis.append(psi)
    if restrict(c1.limit, psis) != c2.limit:
        _LOGGER.info("Composed maps do not carry one limit onto the other")
        return None
    for i, psi in enumerate(psis):
        composed_back = linalg.matmul(base, c2.maps_limit[i], psi)
        if not linalg.arrays_equal(composed_back, c1.maps_limit[i]):
            _LOGGER.info("Coordinate %d: limit maps are not compatible", i + 1)
            return None
    return psis
