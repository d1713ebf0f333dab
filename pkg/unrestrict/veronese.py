"""
Unrestriction of symmetric and partially symmetric degenerations.

Forms are dictionaries from exponent vectors to series coefficients. A family
of forms is made jointly concise at the limit one variable at a time: the
partial in the next variable is cleaned of its components along the earlier
partials by a coefficient search, then the variable is rescaled by the smallest weight
``t^w`` keeping every coefficient regular. Weights can be fractional, which
is where Puiseux exponents enter.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING, Any

import numpy as np

from . import linalg
from .exact import ScalarField, SeriesElem, SeriesField, Valuation
from .exceptions import (
    BasisExtractionFailure,
    NegativeValuation,
    NotGenericallyConcise,
    NotJointlyConcise,
    PreconditionFailure,
    ShapeMismatch,
    UnsupportedField,
)
from .segre import Degeneration, UnrestrictionCertificate
from .tensor import (
    Monomial,
    Tensor,
    exponent_of,
    flatten_coordinate_block,
    form_view,
    is_concise,
    limit_tensor,
    multinomial,
    restrict,
    symmetric_from_polynomial,
)

if TYPE_CHECKING:
    from collections.abc import Iterable, Mapping, Sequence

_LOGGER = logging.getLogger(__name__)

Form = dict[Monomial, Any]


def monomials(m: int, degree: int) -> list[Monomial]:
    """Return every exponent vector of the given degree, descending lex."""
    found = {
        exponent_of(index, m)
        for index in itertools.combinations_with_replacement(range(m), degree)
    }
    return sorted(found, reverse=True)


def partial_derivative(form: Mapping[Monomial, Any], k: int) -> Form:
    """Return the partial derivative in variable ``k``."""
    out: Form = {}
    for exponent, coeff in form.items():
        if exponent[k]:
            lowered = exponent[:k] + (exponent[k] - 1,) + exponent[k + 1 :]
            out[lowered] = coeff * exponent[k]
    return out


def _multiply(a: Mapping[Monomial, Any], b: Mapping[Monomial, Any]) -> Form:
    out: Form = {}
    for (ea, ca), (eb, cb) in itertools.product(a.items(), b.items()):
        key = tuple(x + y for x, y in zip(ea, eb, strict=True))
        out[key] = out[key] + ca * cb if key in out else ca * cb
    return {k: v for k, v in out.items() if v}


def substitute_linear(
    form: Mapping[Monomial, Any], matrix: np.ndarray, ring: Any
) -> Form:
    """
    Return the form after ``v_j ↦ sum_i matrix[i, j] v_i``.

    This is the action of ``restrict`` with ``matrix`` on every axis.
    """
    m = matrix.shape[0]
    unit = tuple(0 for _ in range(m))
    linear = [
        {
            tuple(int(a == i) for a in range(m)): ring.convert(matrix[i, j])
            for i in range(m)
            if matrix[i, j]
        }
        for j in range(matrix.shape[1])
    ]
    powers: dict[tuple[int, int], Form] = {}

    def power(j: int, e: int) -> Form:
        if (j, e) not in powers:
            powers[j, e] = (
                {unit: ring.one}
                if e == 0
                else _multiply(power(j, e - 1), linear[j])
            )
        return powers[j, e]

    out: Form = {}
    for exponent, coeff in form.items():
        term: Form = {unit: ring.convert(coeff)}
        for j, e in enumerate(exponent):
            if e:
                term = _multiply(term, power(j, e))
        for key, value in term.items():
            out[key] = out[key] + value if key in out else value
    return {k: v for k, v in out.items() if v}


@dataclass(frozen=True, slots=True, eq=False)
class PolyFamily:
    """Forms of one degree in ``nvars`` variables with coefficients in k[[t^{1/N}]]."""

    field: ScalarField
    nvars: int
    degree: int
    members: tuple[Form, ...]

    def __post_init__(self) -> None:
        """Validate degrees and valuations, and convert coefficients to series."""
        if not self.field.supports_degree(self.degree):
            msg = (
                f"forms of degree {self.degree} need characteristic 0 "
                f"or above {self.degree}"
            )
            raise UnsupportedField(msg)
        ring = SeriesField(self.field)
        members: list[Form] = []
        for form in self.members:
            converted: Form = {}
            for exponent, coeff in form.items():
                exponent = tuple(exponent)
                if len(exponent) != self.nvars or sum(exponent) != self.degree:
                    msg = (
                        f"monomial {exponent} is not of degree {self.degree} "
                        f"in {self.nvars} variables"
                    )
                    raise ShapeMismatch(msg)
                value = ring.convert(coeff)
                if not value:
                    continue
                if value.valuation() < 0:
                    msg = f"coefficient {value} of {exponent} has negative valuation"
                    raise NegativeValuation(msg)
                converted[exponent] = value
            members.append(converted)
        object.__setattr__(self, "members", tuple(members))

    @property
    def ring(self) -> SeriesField:
        """Return the coefficient field."""
        return SeriesField(self.field)

    @property
    def exp_denominator(self) -> int:
        """Return the lcm of the exponent denominators of all coefficients."""
        return math.lcm(1, *(c.n for form in self.members for c in form.values()))

    def limit_forms(self) -> list[Form]:
        """Return the forms at ``t = 0``."""
        out: list[Form] = []
        for form in self.members:
            limits = {e: c.limit_at_zero() for e, c in form.items()}
            out.append({e: c for e, c in limits.items() if c})
        return out

    def substitute(self, matrix: np.ndarray) -> PolyFamily:
        """Return the family restricted along ``matrix``."""
        ring = self.ring
        return PolyFamily(
            self.field,
            self.nvars,
            self.degree,
            tuple(substitute_linear(form, matrix, ring) for form in self.members),
        )


@dataclass(frozen=True, slots=True)
class StepReport:
    """Provenance of one variable step."""

    variable: int
    iterations: int
    e_values: tuple[Valuation, ...]
    weight: Fraction
    exp_denominator: int


@dataclass(frozen=True, slots=True, eq=False)
class FamilyUnrestriction:
    """A family jointly concise at the limit and the map restricting it back."""

    family: PolyFamily
    map_t: np.ndarray
    steps: tuple[StepReport, ...]
    exp_denominator: int


@dataclass(frozen=True, slots=True, eq=False)
class SymmetricUnrestriction:
    """
    A concise symmetric unrestriction of one form.

    ``restrict(form_t, map_t) * scale`` equals the input form; the scale is one
    unless the input vanishes at ``t = 0``.
    """

    limit: Form
    form_t: Form
    map_t: np.ndarray
    scale: SeriesElem
    exp_denominator: int
    steps: tuple[StepReport, ...]
    nvars: int
    degree: int
    field: ScalarField

    def limit_tensor(self) -> Tensor:
        """Return the limit as a symmetric tensor."""
        return symmetric_from_polynomial(
            self.field, self.limit, self.nvars, self.degree
        )


def _partials_matrix(
    ring: Any,
    forms: Sequence[Mapping[Monomial, Any]],
    nvars: int,
    degree: int,
    variables: Iterable[int],
) -> np.ndarray:
    """Return partial-derivative columns; rows run over (member, monomial)."""
    rows = [(f, mu) for f in range(len(forms)) for mu in monomials(nvars, degree - 1)]
    variables = list(variables)
    out = linalg.zeros(ring, (len(rows), len(variables)))
    row_of = {key: i for i, key in enumerate(rows)}
    for col, k in enumerate(variables):
        for f, form in enumerate(forms):
            for mu, coeff in partial_derivative(form, k).items():
                out[row_of[f, mu], col] = ring.convert(coeff)
    return out


def concise_space(
    field: ScalarField, forms: Sequence[Mapping[Monomial, Any]], nvars: int, degree: int
) -> list[np.ndarray]:
    """
    Return a basis of the smallest subspace the forms live in.

    The subspace is the column space of the matrix whose row ``k`` lists the
    coefficients of the ``k``-th partials; the basis returned is the reduced
    echelon one, so coordinate subspaces come back as standard vectors.
    """
    partials = _partials_matrix(field, forms, nvars, degree, range(nvars))
    reduced, pivots = linalg.rref(field, partials)
    return [np.array(reduced[row, :], dtype=object) for row in range(len(pivots))]


def jointly_concise_rank(family: PolyFamily) -> int:
    """Return the rank of the partials of the general member over k(t)."""
    matrix = _partials_matrix(
        family.ring, family.members, family.nvars, family.degree, range(family.nvars)
    )
    return linalg.rank(family.ring, matrix)


def adapted_basis(
    field: ScalarField, basis: Sequence[np.ndarray], m: int
) -> np.ndarray:
    """Return an invertible matrix whose first columns are ``basis``."""
    columns = [np.array(v, dtype=object) for v in basis]
    for k in range(m):
        if len(columns) == m:
            break
        unit = linalg.zeros(field, (m,))
        unit[k] = field.one
        candidate = np.stack([*columns, unit], axis=1)
        if linalg.rank(field, candidate) == len(columns) + 1:
            columns.append(unit)
    return np.stack(columns, axis=1)


def _check_precondition(family: PolyFamily, r: int) -> None:
    limits = family.limit_forms()
    for form in limits:
        for exponent in form:
            if any(exponent[r:]):
                msg = f"limit uses variables beyond the first {r}"
                raise PreconditionFailure(msg)
    if r:
        partials = _partials_matrix(
            family.field, limits, family.nvars, family.degree, range(r)
        )
        if linalg.rank(family.field, partials) != r:
            msg = f"limit partials in the first {r} variables are dependent"
            raise PreconditionFailure(msg)


def _shift(column: np.ndarray, exponent: Fraction) -> np.ndarray:
    return linalg.map_array(column, lambda x: x.times_power(exponent))


def unrestrict_poly_step(
    family: PolyFamily, r: int
) -> tuple[PolyFamily, np.ndarray, StepReport]:
    """
    Make the limit jointly concise in one more variable.

    The family must be jointly concise at the limit in exactly ``v_0..v_{r-1}``
    with independent partials. Returns the new family ``H``, the map ``φ``
    with ``restrict(H, φ) = family`` and a report of the step.
    """
    if not 0 <= r < family.nvars:
        msg = f"variable {r + 1} out of range for {family.nvars} variables"
        raise PreconditionFailure(msg)
    _check_precondition(family, r)
    ring = family.ring
    field = family.field
    m = family.nvars
    nu = family.degree

    full = _partials_matrix(ring, family.members, m, nu, range(r + 1))
    if linalg.rank(ring, full) != r + 1:
        msg = f"partial in variable {r + 1} lies in the span of the earlier partials"
        raise NotJointlyConcise(msg)
    a = np.array(full[:, :r], dtype=object)
    a0 = linalg.limit_matrix(ring, a)
    n = family.exp_denominator
    uniformizer = Fraction(1, n)
    bound = 1 + (r + 1) * max(linalg.cleared_degrees(linalg.transpose(full)), default=0)

    remainder = _shift(np.array(full[:, r], dtype=object), -uniformizer)
    lambdas = [ring.zero for _ in range(r)]
    iterations = 0
    while True:
        r0 = linalg.limit_matrix(ring, remainder)
        solution = linalg.solve(field, a0, r0)
        if solution is None:
            break
        iterations += 1
        if iterations > bound:
            msg = f"coefficient search for variable {r + 1} exceeded {bound} rounds"
            raise NotJointlyConcise(msg)
        power = SeriesElem.t_power(field, uniformizer * iterations)
        for i in range(r):
            lambdas[i] = lambdas[i] + power * solution[i]
        correction = linalg.matmul(ring, a, linalg.convert_array(ring, solution))
        remainder = _shift(remainder - correction, -uniformizer)
    _LOGGER.debug("Variable %d: coefficient search took %d rounds", r + 1, iterations)

    psi = linalg.identity(ring, m)
    psi_inv = linalg.identity(ring, m)
    for i in range(r):
        psi[r, i] = -lambdas[i]
        psi_inv[r, i] = lambdas[i]
    shifted = family.substitute(psi)

    e_values: list[Valuation] = []
    for j in range(1, nu + 1):
        vals = [
            c.valuation()
            for form in shifted.members
            for exponent, c in form.items()
            if exponent[r] == j
        ]
        e_values.append(min(vals, default=math.inf))
    finite = [Fraction(e) / j for j, e in enumerate(e_values, start=1) if e != math.inf]
    if not finite:
        msg = f"variable {r + 1} does not occur in the family"
        raise NotJointlyConcise(msg)
    weight = min(finite)
    _LOGGER.debug("Variable %d: e-values %s, weight %s", r + 1, e_values, weight)

    rescaled = PolyFamily(
        field,
        m,
        nu,
        tuple(
            {
                exponent: c.times_power(-weight * exponent[r])
                for exponent, c in form.items()
            }
            for form in shifted.members
        ),
    )
    if weight == e_values[0]:
        lowered = monomials(m, nu - 1)
        for f in range(len(family.members)):
            for index, mu in enumerate(lowered):
                if mu[r] and remainder[f * len(lowered) + index].limit_at_zero():
                    msg = "remainder at t = 0 still involves the new variable"
                    raise AssertionError(msg)
    limit_partials = _partials_matrix(
        field, rescaled.limit_forms(), m, nu, range(r + 1)
    )
    if linalg.rank(field, limit_partials) != r + 1:
        msg = f"limit partials in the first {r + 1} variables are dependent"
        raise AssertionError(msg)

    scaling = linalg.identity(ring, m)
    scaling[r, r] = SeriesElem.t_power(field, weight)
    step_map = linalg.matmul(ring, psi_inv, scaling)
    exp_denominator = math.lcm(n, weight.denominator, rescaled.exp_denominator)
    report = StepReport(r, iterations, tuple(e_values), weight, exp_denominator)
    return rescaled, step_map, report


def _swap(ring: Any, m: int, a: int, b: int) -> np.ndarray:
    perm = linalg.identity(ring, m)
    perm[[a, b]] = perm[[b, a]]
    return perm


def unrestrict_family(family: PolyFamily) -> FamilyUnrestriction:
    """Run the variable step until the limit is jointly concise."""
    ring = family.ring
    field = family.field
    m = family.nvars
    if jointly_concise_rank(family) != m:
        msg = f"general members are not jointly concise in {m} variables"
        raise NotJointlyConcise(msg)
    current = family
    phi = linalg.identity(ring, m)
    steps: list[StepReport] = []
    for _ in range(m + 1):
        basis = concise_space(field, current.limit_forms(), m, current.degree)
        r = len(basis)
        if r == m:
            break
        g = adapted_basis(field, basis, m)
        current = current.substitute(linalg.inverse(field, g))
        phi = linalg.matmul(ring, phi, linalg.convert_array(ring, g))
        pick = None
        for k in range(r, m):
            columns = [*range(r), k]
            matrix = _partials_matrix(ring, current.members, m, current.degree, columns)
            if linalg.rank(ring, matrix) == r + 1:
                pick = k
                break
        if pick is None:
            msg = f"no variable extends the {r} concise ones"
            raise NotJointlyConcise(msg)
        if pick != r:
            swap = _swap(ring, m, r, pick)
            current = current.substitute(swap)
            phi = linalg.matmul(ring, phi, swap)
        current, step_map, report = unrestrict_poly_step(current, r)
        phi = linalg.matmul(ring, phi, step_map)
        steps.append(report)
    else:
        msg = "variable steps did not reach a concise limit"
        raise AssertionError(msg)
    exp_denominator = math.lcm(
        current.exp_denominator, *(s.exp_denominator for s in steps)
    )
    return FamilyUnrestriction(current, phi, tuple(steps), exp_denominator)


def _normalize(form: Form, field: ScalarField) -> tuple[Form, SeriesElem]:
    scale = SeriesElem.constant(field, 1)
    if not form:
        msg = "the zero form has no concise unrestriction"
        raise NotJointlyConcise(msg)
    lowest = min(c.valuation() for c in form.values())
    if lowest == 0:
        return form, scale
    leading = next(
        c for e in sorted(form, reverse=True) if (c := form[e]).valuation() == lowest
    )
    scale = SeriesElem.t_power(field, lowest) * leading.initial_coefficient()
    _LOGGER.debug("Dividing the form by %s so that its limit is nonzero", scale)
    return {e: c / scale for e, c in form.items()}, scale


def unrestrict_symmetric(
    form: Mapping[Monomial, Any], nvars: int, degree: int, field: ScalarField
) -> SymmetricUnrestriction:
    """
    Return a concise unrestriction of a single form.

    A form whose limit vanishes is first divided by ``c t^v`` for its lowest
    valuation ``v`` and the initial coefficient ``c`` of the first monomial
    attaining it.
    """
    family = PolyFamily(field, nvars, degree, (dict(form),))
    normalized, scale = _normalize(family.members[0], field)
    result = unrestrict_family(PolyFamily(field, nvars, degree, (normalized,)))
    member = result.family.members[0]
    limit = result.family.limit_forms()[0]
    return SymmetricUnrestriction(
        limit=limit,
        form_t=member,
        map_t=result.map_t,
        scale=scale,
        exp_denominator=result.exp_denominator,
        steps=result.steps,
        nvars=nvars,
        degree=degree,
        field=field,
    )


def dvr_basis(ring: SeriesField, matrix: np.ndarray) -> list[int]:
    """
    Return columns spanning the column space with regular coordinates.

    Full pivoting on minimal valuation, ties broken by (column, row), makes
    every other column a k[[t]]-combination of the chosen ones.
    """
    m = np.array(matrix, dtype=object, copy=True)
    n_rows, n_cols = m.shape
    active = list(range(n_cols))
    used: set[int] = set()
    pivots: list[int] = []
    while True:
        best: tuple[Fraction, int, int] | None = None
        for c in active:
            for r in range(n_rows):
                if r in used or not m[r, c]:
                    continue
                key = (Fraction(m[r, c].valuation()), c, r)
                if best is None or key < best:
                    best = key
        if best is None:
            break
        _, c, r = best
        pivots.append(c)
        active.remove(c)
        used.add(r)
        for j in active:
            if m[r, j]:
                factor = m[r, j] / m[r, c]
                m[:, j] = m[:, j] - m[:, c] * factor
    return sorted(pivots)


def _column_form(T: Tensor, i: int, column: np.ndarray) -> Form:
    n = T.dims[i]
    nu = T.fmt[i]
    form: Form = {}
    for exponent in monomials(n, nu):
        index = tuple(k for k, e in enumerate(exponent) for _ in range(e))
        flat = 0
        for k in index:
            flat = flat * n + k
        value = column[flat]
        if value:
            form[exponent] = value * multinomial(exponent)
    return form


def unrestrict_partial(
    D: Degeneration, order: Sequence[int] | None = None
) -> UnrestrictionCertificate:
    """
    Return a concise unrestriction of a partially symmetric degeneration.

    Each coordinate in turn contributes a basis of its flattening image; the
    family algorithm makes it jointly concise and the tensor is re-expressed
    through the inverse of the resulting map.
    """
    T = D.tensor
    ring = D.ring
    field = ring.base
    if T.order == 1:
        result = unrestrict_symmetric(form_view(T), T.dims[0], T.fmt[0], field)
        unrestriction = symmetric_from_polynomial(
            ring, result.form_t, T.dims[0], T.fmt[0]
        )
        return UnrestrictionCertificate(
            source=D,
            order=(0,),
            unrestriction=Degeneration(unrestriction),
            maps_t=(result.map_t,),
            limit=result.limit_tensor(),
            maps_limit=(linalg.limit_matrix(ring, result.map_t),),
            minor_choices=((),),
            scale=result.scale,
            exp_denominator=result.exp_denominator,
        )
    order = tuple(order) if order is not None else tuple(range(T.order))
    if sorted(order) != list(range(T.order)):
        msg = f"order {[k + 1 for k in order]} is not a permutation of 1..{T.order}"
        raise PreconditionFailure(msg)
    for i in range(T.order):
        if not is_concise(T, i):
            raise NotGenericallyConcise(i)
    current = T
    maps: list[np.ndarray] = [linalg.identity(ring, n) for n in T.dims]
    choices: list[tuple[int, ...]] = [() for _ in T.dims]
    exp_denominator = 1
    for i in order:
        block = flatten_coordinate_block(current, i)
        columns = dvr_basis(ring, block)
        forms = tuple(_column_form(current, i, block[:, c]) for c in columns)
        family = PolyFamily(field, current.dims[i], current.fmt[i], forms)
        result = unrestrict_family(family)
        inverse_maps = [linalg.identity(ring, n) for n in current.dims]
        inverse_maps[i] = linalg.inverse(ring, result.map_t)
        current = restrict(current, inverse_maps)
        negative = [
            x for x in linalg.series_entries(current.entries) if x.valuation() < 0
        ]
        if negative:
            lowest = min(x.valuation() for x in negative)
            msg = f"re-expressing coordinate {i + 1} produced valuation {lowest}"
            raise BasisExtractionFailure(msg)
        if not is_concise(limit_tensor(current), i):
            msg = f"limit is not concise on coordinate {i + 1} after its step"
            raise AssertionError(msg)
        maps[i] = result.map_t
        choices[i] = tuple(columns)
        exp_denominator = math.lcm(exp_denominator, result.exp_denominator)
        _LOGGER.debug("Coordinate %d: basis columns %s", i + 1, columns)
    unrestriction = Degeneration(current)
    return UnrestrictionCertificate(
        source=D,
        order=order,
        unrestriction=unrestriction,
        maps_t=tuple(maps),
        limit=unrestriction.limit(),
        maps_limit=tuple(linalg.limit_matrix(ring, m) for m in maps),
        minor_choices=tuple(choices),
        exp_denominator=exp_denominator,
    )
