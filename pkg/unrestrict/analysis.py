"""
Border rank diagnostics for concise tensors in (k^m)^{⊗d}.

The centroid of ``T`` is the space of tuples ``(X_1, ..., X_d)`` of
endomorphisms with ``X_1 ∘ T = ... = X_d ∘ T``; composition in the first
slot makes it a commutative algebra. Centroid abundance, 1-genericity and the
cactus certificates below all revolve around it.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any

import numpy as np

from . import linalg
from .algebra import FiniteAlgebra, Functional, evaluation_tensor
from .const import MAX_BORDER_RANK_DECISION, REPORT_SCHEMA_VERSION
from .exceptions import (
    ClosureFailure,
    Not1Generic,
    NotConcise,
    NotRegular,
    PreconditionFailure,
    ShapeMismatch,
    UnsupportedField,
    UnsupportedSize,
)
from .tensor import Tensor, concise_coordinates, flatten, is_concise, restrict

if TYPE_CHECKING:
    import random
    from collections.abc import Mapping, Sequence

_LOGGER = logging.getLogger(__name__)

VERDICT_DECIDED = "decided"
VERDICT_NECESSARY_ONLY = "necessary-only"


@dataclass(frozen=True, slots=True, eq=False)
class Centroid:
    """A basis of the centroid and the algebra it forms."""

    dim: int
    basis: tuple[tuple[np.ndarray, ...], ...]
    algebra: FiniteAlgebra

    def component(self, a: np.ndarray, i: int) -> np.ndarray:
        """Return the endomorphism of coordinate ``i`` for an algebra element."""
        field_ = self.algebra.field
        m = self.basis[0][i].shape[0]
        out = linalg.zeros(field_, (m, m))
        for coeff, tup in zip(a, self.basis, strict=True):
            if coeff:
                out = out + tup[i] * coeff
        return out

    @property
    def is_abundant(self) -> bool:
        """Return True if the dimension reaches ``m``."""
        return self.dim >= self.basis[0][0].shape[0]

    @property
    def is_nilpotent(self) -> bool:
        """Return True if the centroid algebra has nonzero nilpotents."""
        return not self.algebra.is_reduced()


@dataclass(frozen=True, slots=True)
class BorderRankVerdict:
    """Centroid abundance together with how much it proves."""

    centroid_dim: int
    m: int
    abundant: bool
    status: str

    @property
    def minimal(self) -> bool | None:
        """Return the decision, or None if abundance is only necessary."""
        return self.abundant if self.status == VERDICT_DECIDED else None


def _check_cubic(T: Tensor) -> int:
    if T.ring.is_series:
        msg = "diagnostics need a tensor over the base field; take the limit first"
        raise PreconditionFailure(msg)
    if not T.is_segre:
        msg = "diagnostics work on tensors without symmetric coordinates"
        raise PreconditionFailure(msg)
    if T.order < 3:  # noqa: PLR2004
        msg = f"the centroid needs at least 3 coordinates, got {T.order}"
        raise PreconditionFailure(msg)
    m = T.dims[0]
    if any(n != m for n in T.dims):
        msg = f"dimensions {T.dims} are not all equal"
        raise ShapeMismatch(msg)
    return m


def _require_concise(T: Tensor) -> None:
    flags = concise_coordinates(T)
    if not all(flags):
        missing = [i + 1 for i, ok in enumerate(flags) if not ok]
        msg = f"tensor is not concise on coordinates {missing}"
        raise NotConcise(msg)


def _action_rows(T: Tensor, c: int) -> np.ndarray:
    """Return the matrix of ``X ↦ X ∘_c T`` in the unknowns ``X[a, b]``."""
    field_ = T.ring
    m = T.dims[c]
    entries = T.entries
    rows = linalg.zeros(field_, (entries.size, m * m))
    for row, index in enumerate(np.ndindex(entries.shape)):
        a = index[c]
        for b in range(m):
            value = entries[(*index[:c], b, *index[c + 1 :])]
            if value:
                rows[row, a * m + b] = value
    return rows


def _flat(matrix: np.ndarray) -> np.ndarray:
    return np.array(matrix.reshape(-1), dtype=object)


def centroid(T: Tensor) -> Centroid:
    """
    Return the centroid of a concise tensor with equal dimensions.

    The unknowns of coordinate ``i`` sit at ``i·m² + a·m + b``. Structure
    constants come from composing first components; the span is checked to be
    closed under composition.
    """
    m = _check_cubic(T)
    _require_concise(T)
    field_ = T.ring
    d = T.order
    actions = [_action_rows(T, c) for c in range(d)]
    blocks = []
    for i in range(1, d):
        block = linalg.zeros(field_, (actions[0].shape[0], d * m * m))
        block[:, : m * m] = actions[0]
        block[:, i * m * m : (i + 1) * m * m] = -actions[i]
        blocks.append(block)
    system = np.concatenate(blocks, axis=0)
    kernel = linalg.nullspace(field_, system)
    basis = tuple(
        tuple(
            np.array(v[i * m * m : (i + 1) * m * m].reshape(m, m), dtype=object)
            for i in range(d)
        )
        for v in kernel
    )
    _LOGGER.debug("Centroid of a %s tensor has dimension %d", T.dims, len(basis))
    firsts = linalg.transpose(np.array([_flat(tup[0]) for tup in basis], dtype=object))
    k = len(basis)
    mult = linalg.zeros(field_, (k, k, k))
    for a in range(k):
        for b in range(k):
            product = linalg.matmul(field_, basis[a][0], basis[b][0])
            coords = linalg.solve(field_, firsts, _flat(product))
            if coords is None:
                msg = (
                    f"composition of centroid elements {a + 1} and {b + 1} "
                    "leaves the span"
                )
                raise ClosureFailure(msg)
            mult[a, b, :] = coords
    unit = linalg.solve(field_, firsts, _flat(linalg.identity(field_, m)))
    if unit is None:
        msg = "identity is not in the centroid span"
        raise ClosureFailure(msg)
    try:
        labels = tuple(f"c{j + 1}" for j in range(k))
        algebra = FiniteAlgebra(field_, mult, unit, labels)
    except PreconditionFailure as err:
        msg = f"centroid composition is not a commutative algebra: {err}"
        raise ClosureFailure(msg) from err
    return Centroid(k, basis, algebra)


def minimal_border_rank_verdict(T: Tensor) -> BorderRankVerdict:
    """
    Return centroid abundance and whether it decides minimal border rank.

    Abundance is equivalent to minimal border rank for ``m ≤ 5`` over the
    rationals and only necessary otherwise.
    """
    cen = centroid(T)
    m = T.dims[0]
    decided = m <= MAX_BORDER_RANK_DECISION and T.ring.base.p is None
    status = VERDICT_DECIDED if decided else VERDICT_NECESSARY_ONLY
    verdict = BorderRankVerdict(cen.dim, m, cen.dim >= m, status)
    _LOGGER.info("Centroid dimension %d for m = %d (%s)", cen.dim, m, status)
    return verdict


def is_minimal_border_rank(T: Tensor) -> bool:
    """Decide whether a concise tensor in (Q^m)^{⊗d}, ``m ≤ 5``, has border rank m."""
    if T.ring.base.p is not None:
        msg = (
            "the centroid criterion is only established in characteristic zero, "
            f"not over {T.ring.base}"
        )
        raise UnsupportedField(msg)
    if T.dims[0] > MAX_BORDER_RANK_DECISION:
        msg = (
            f"m = {T.dims[0]} exceeds {MAX_BORDER_RANK_DECISION}; "
            "use minimal_border_rank_verdict for the necessary condition"
        )
        raise UnsupportedSize(msg)
    return minimal_border_rank_verdict(T).abundant


def _contraction_slices(T: Tensor, i: int) -> list[np.ndarray]:
    """Return the flattenings of ``T(e_k^*)`` onto coordinate ``i + 1`` for every k."""
    j = (i + 1) % T.order
    position = j if j < i else j - 1
    slices = []
    for k in range(T.dims[i]):
        part = np.take(T.entries, k, axis=i)
        moved = np.moveaxis(part, position, 0)
        slices.append(np.array(moved.reshape(T.dims[j], -1), dtype=object))
    return slices


def _witness(T: Tensor, i: int, rng: random.Random) -> Functional | None:
    j = (i + 1) % T.order
    slices = _contraction_slices(T, i)
    coeffs = linalg.full_rank_combination(T.ring, slices, T.dims[j], rng)
    if coeffs is None:
        return None
    return Functional(T.ring, coeffs)


def one_generic_witness(T: Tensor, i: int, rng: random.Random) -> Functional | None:
    """
    Return ``α`` on coordinate ``i`` whose contraction ``T(α)`` has full rank.

    None means no such functional exists; the generic rank of the contraction
    pencil decides this exactly.
    """
    m = _check_cubic(T)
    _require_concise(T)
    if centroid(T).dim < m:
        msg = "1-genericity witnesses are only meaningful for centroid-abundant tensors"
        raise PreconditionFailure(msg)
    return _witness(T, i, rng)


def is_one_generic_on(T: Tensor, i: int, rng: random.Random) -> bool:
    """Return True if coordinate ``i`` admits a full-rank contraction."""
    return _witness(T, i, rng) is not None


@dataclass(frozen=True, slots=True, eq=False)
class RecoveredStructure:
    """An algebra, a functional and identifications ``A ≅ W_i^∨`` presenting T."""

    algebra: FiniteAlgebra
    eps: Functional
    generators: tuple[Functional, ...]
    isomorphisms: tuple[np.ndarray, ...]


def recover_structure(T: Tensor, rng: random.Random) -> RecoveredStructure:
    """
    Present a 1-generic centroid-abundant tensor as an evaluation tensor.

    Each ``W_i^∨`` is a cyclic module over the centroid generated by a witness
    ``α_i``; ``isomorphisms[i]`` sends ``a`` to ``X_i(a)^T α_i``. Restricting T
    by their transposes gives ``evaluation_tensor(algebra, eps)`` exactly.
    """
    m = _check_cubic(T)
    _require_concise(T)
    cen = centroid(T)
    if cen.dim != m:
        msg = f"centroid has dimension {cen.dim}, expected {m}"
        raise Not1Generic(msg)
    A = cen.algebra
    field_ = T.ring
    generators: list[Functional] = []
    isomorphisms: list[np.ndarray] = []
    for i in range(T.order):
        alpha = _witness(T, i, rng)
        if alpha is None:
            msg = f"no full-rank contraction on coordinate {i + 1}"
            raise Not1Generic(msg)
        columns = [
            linalg.matmul(field_, linalg.transpose(tup[i]), alpha.coefficients)
            for tup in cen.basis
        ]
        psi = linalg.transpose(np.array(columns, dtype=object))
        if not linalg.is_invertible(field_, psi):
            msg = f"witness on coordinate {i + 1} does not generate the dual space"
            raise Not1Generic(msg)
        generators.append(alpha)
        isomorphisms.append(psi)
    pulled = restrict(T, [linalg.transpose(psi) for psi in isomorphisms])
    # ε(e_k) is the pulled tensor evaluated on (e_k, 1, ..., 1)
    values = pulled.entries
    for _ in range(1, T.order):
        values = np.tensordot(values, A.unit, axes=([1], [0]))
    eps = Functional(field_, values)
    if pulled != evaluation_tensor(A, eps, T.order):
        msg = "recovered algebra does not reproduce the tensor"
        raise Not1Generic(msg)
    _LOGGER.info("Recovered a %d-dimensional algebra (local: %s)", m, A.is_local())
    return RecoveredStructure(A, eps, tuple(generators), tuple(isomorphisms))


def _span_basis(field_: Any, vectors: Sequence[np.ndarray]) -> list[np.ndarray]:
    if not vectors:
        return []
    matrix = linalg.transpose(np.array(list(vectors), dtype=object))
    return [vectors[c] for c in linalg.pivot_columns(field_, matrix)]


def _check_map(A: FiniteAlgebra, phi: np.ndarray) -> None:
    if phi.ndim != 2 or phi.shape[1] != A.dim:  # noqa: PLR2004
        msg = (
            f"restriction map of shape {phi.shape} does not start "
            f"at a {A.dim}-dimensional dual"
        )
        raise ShapeMismatch(msg)


def dual_image(A: FiniteAlgebra, phi: np.ndarray) -> list[np.ndarray]:
    """Return the rows of ``φ``, spanning the image of ``φ^∨`` in A."""
    _check_map(A, phi)
    return [linalg.convert_array(A.field, np.array(row, dtype=object)) for row in phi]


def is_regular(
    phi: np.ndarray, A: FiniteAlgebra, module_action: Sequence[np.ndarray] | None = None
) -> bool:
    """
    Return True if ``A ⊗ V^∨ → A^∨`` induced by ``φ`` is surjective.

    ``module_action[k]`` is the action of ``e_k`` on the cyclic module; by
    default the module is A itself. Equivalently, the image of ``φ^∨``
    generates the unit ideal.
    """
    actions = (
        [A.left_matrix(A.basis_element(k)) for k in range(A.dim)]
        if module_action is None
        else [linalg.as_matrix(A.field, act) for act in module_action]
    )
    products = [
        linalg.matmul(A.field, act, row)
        for act in actions
        for row in dual_image(A, phi)
    ]
    return len(_span_basis(A.field, products)) == A.dim


def _product_span(A: FiniteAlgebra, phis: Sequence[np.ndarray]) -> list[np.ndarray]:
    span = [np.array(A.unit, dtype=object)]
    for phi in phis:
        span = _span_basis(
            A.field, [A.multiply(s, row) for s in span for row in dual_image(A, phi)]
        )
    return span


def is_jointly_spanning(phis: Sequence[np.ndarray], A: FiniteAlgebra) -> bool:
    """Return True if products ``φ_1^∨(v_1) ⋯ φ_d^∨(v_d)`` span A."""
    return len(_product_span(A, phis)) == A.dim


@dataclass(frozen=True, slots=True, eq=False)
class CactusCertificate:
    """
    An algebra, a functional and regular restrictions witnessing a cactus bound.

    ``smoothable`` is asserted by the user; it is never computed.
    """

    algebra: FiniteAlgebra
    eps: Functional
    maps: tuple[np.ndarray, ...]
    smoothable: bool = False
    notes: tuple[str, ...] = field(default=())

    @property
    def rank_bound(self) -> int:
        """Return the cactus rank bound the certificate witnesses."""
        return self.algebra.dim


def build_cactus_tensor(cert: CactusCertificate) -> Tensor:
    """Return the restriction of the evaluation tensor by the certificate maps."""
    for phi in cert.maps:
        _check_map(cert.algebra, phi)
    source = evaluation_tensor(cert.algebra, cert.eps, len(cert.maps))
    return restrict(source, list(cert.maps))


def verify_cactus_certificate(T: Tensor, cert: CactusCertificate) -> bool:
    """
    Check that every map is regular and that the certificate builds T.

    A non-regular map raises NotRegular naming its coordinate.
    """
    for i, phi in enumerate(cert.maps):
        if not is_regular(phi, cert.algebra):
            raise NotRegular(i)
    matches = build_cactus_tensor(cert) == T
    if matches:
        _LOGGER.info("Cactus rank at most %d witnessed", cert.rank_bound)
    else:
        _LOGGER.info("Certificate tensor differs from the input")
    return matches


def linear_span(A: FiniteAlgebra, phis: Sequence[np.ndarray]) -> list[Tensor]:
    """Return a basis of the tensors ``restrict(evaluation_tensor(A, ε), φ)``."""
    tensors = [
        restrict(
            evaluation_tensor(A, Functional.dual_basis(A.field, A.dim, k), len(phis)),
            list(phis),
        )
        for k in range(A.dim)
    ]
    vectors = [_flat(t.entries) for t in tensors]
    matrix = linalg.transpose(np.array(vectors, dtype=object))
    return [tensors[c] for c in linalg.pivot_columns(A.field, matrix)]


@dataclass(frozen=True, slots=True, eq=False)
class Subalgebra:
    """A subalgebra together with its inclusion (columns are basis elements)."""

    algebra: FiniteAlgebra
    inclusion: np.ndarray


def generated_subalgebra(A: FiniteAlgebra, phis: Sequence[np.ndarray]) -> Subalgebra:
    """Return the subalgebra generated by the images of every ``φ_i^∨``."""
    field_ = A.field
    generators = [row for phi in phis for row in dual_image(A, phi)]
    span = _span_basis(field_, [np.array(A.unit, dtype=object), *generators])
    while True:
        products = [A.multiply(a, b) for a in span for b in generators]
        grown = _span_basis(field_, span + products)
        if len(grown) == len(span):
            break
        span = grown
    inclusion = linalg.transpose(np.array(span, dtype=object))
    k = len(span)
    mult = linalg.zeros(field_, (k, k, k))
    for a in range(k):
        for b in range(a, k):
            coords = linalg.solve(field_, inclusion, A.multiply(span[a], span[b]))
            if coords is None:
                msg = "generated span is not closed under multiplication"
                raise ClosureFailure(msg)
            mult[a, b, :] = coords
            mult[b, a, :] = coords
    unit = linalg.solve(field_, inclusion, A.unit)
    return Subalgebra(FiniteAlgebra(field_, mult, unit), inclusion)


def shrink_certificate(cert: CactusCertificate) -> CactusCertificate:
    """Move a certificate onto the subalgebra its maps generate; same tensor."""
    sub = generated_subalgebra(cert.algebra, cert.maps)
    field_ = cert.algebra.field
    pulled = linalg.matmul(
        field_, linalg.transpose(sub.inclusion), cert.eps.coefficients
    )
    eps = Functional(field_, pulled)
    maps = []
    for phi in cert.maps:
        image = linalg.transpose(linalg.as_matrix(field_, phi))
        lifted = linalg.solve(field_, sub.inclusion, image)
        if lifted is None:
            msg = "restriction image is outside the generated subalgebra"
            raise ClosureFailure(msg)
        maps.append(linalg.transpose(lifted))
    return CactusCertificate(sub.algebra, eps, tuple(maps), cert.smoothable, cert.notes)


def partial_restriction_conciseness(
    T: Tensor, phis: Mapping[int, np.ndarray]
) -> dict[int, bool]:
    """Restrict the coordinates in ``phis``; report conciseness on the others."""
    maps = [
        linalg.as_matrix(T.ring, phis[i])
        if i in phis
        else linalg.identity(T.ring, n)
        for i, n in enumerate(T.dims)
    ]
    restricted = restrict(T, maps)
    return {j: is_concise(restricted, j) for j in range(T.order) if j not in phis}


def concise_secant_dimension(
    m: int, dims: Sequence[int], *, affine: bool = False
) -> int:
    """Return the expected dimension of the m-th secant of the Segre variety."""
    d = len(dims)
    projective = m * sum(dims) - m * (d - 1) - 1
    return projective + 1 if affine else projective


def analyze(T: Tensor, rng: random.Random) -> dict[str, Any]:
    """Return the diagnostics report of a tensor over the base field."""
    report: dict[str, Any] = {
        "schema_version": REPORT_SCHEMA_VERSION,
        "dims": list(T.dims),
        "field": str(T.ring.base),
        "concise": concise_coordinates(T),
        "flattening_ranks": [
            linalg.rank(T.ring, flatten(T, [i])) for i in range(T.order)
        ],
    }
    equal = len(set(T.dims)) == 1 and T.order >= 3  # noqa: PLR2004
    if not (equal and all(report["concise"]) and T.is_segre):
        report["centroid_dim"] = None
        return report
    verdict = minimal_border_rank_verdict(T)
    cen = centroid(T)
    report["centroid_dim"] = cen.dim
    report["centroid_nilpotent"] = cen.is_nilpotent
    report["minimal_border_rank"] = verdict.minimal
    report["minimal_border_rank_status"] = verdict.status
    report["centroid_abundant"] = verdict.abundant
    report["one_generic"] = [is_one_generic_on(T, i, rng) for i in range(T.order)]
    if verdict.abundant and all(report["one_generic"]):
        try:
            recovered = recover_structure(T, rng)
        except Not1Generic as err:
            _LOGGER.info("Structure recovery failed: %s", err)
        else:
            report["recovered_algebra"] = {
                "dim": recovered.algebra.dim,
                "local": recovered.algebra.is_local(),
                "nilradical_dim": recovered.algebra.nilradical_dimension(),
                "eps": [T.ring.format(x) for x in recovered.eps.coefficients],
            }
    return report
