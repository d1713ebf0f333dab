"""
JSON documents for tensors, polynomial families, algebras and certificates.

Every parser validates the raw structure with voluptuous first and reports
the first problem as a :class:`SchemaError` carrying a JSON pointer. Values
are exact rational strings (``"-3/2"``), integers, or series objects
``{"num": [[exp, coeff], ...], "den": [...], "N": n}`` meaning
``num(s)/den(s)`` with ``t = s**N``.
"""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING, Any

import numpy as np
import voluptuous as vol

from . import linalg
from .algebra import FiniteAlgebra, Functional, algebra_from_monomial_quotient
from .analysis import CactusCertificate
from .const import (
    FIELD_RATIONALS,
    KEY_ALGEBRA,
    KEY_COEFF,
    KEY_DEGREE,
    KEY_DEN,
    KEY_DIM,
    KEY_DIMS,
    KEY_ENTRIES,
    KEY_EPS,
    KEY_EXP_DENOMINATOR,
    KEY_FIELD,
    KEY_FIELD_PRIME,
    KEY_FORMAT,
    KEY_INDEX,
    KEY_MAPS,
    KEY_MONOMIAL,
    KEY_MULT,
    KEY_NUM,
    KEY_PRESENTATION,
    KEY_SCHEMA_VERSION,
    KEY_TERMS,
    KEY_UNIT,
    KEY_VALUE,
    KEY_VARIABLES,
    MINOR_CHOICES,
    REPORT_SCHEMA_VERSION,
)
from .exact import (
    RATIONALS,
    ScalarField,
    SeriesElem,
    SeriesField,
    series_from_polynomial,
)
from .exceptions import SchemaError, UnrestrictError
from .segre import Degeneration, MinorChoice, UnrestrictionCertificate
from .tensor import Tensor, limit_tensor
from .veronese import PolyFamily

if TYPE_CHECKING:
    from collections.abc import Sequence

    from .exact import Ring

_LOGGER = logging.getLogger(__name__)

KIND_UNRESTRICTION = "unrestriction"
KIND_CACTUS = "cactus"

_COUNT = vol.All(int, vol.Range(min=1))
_NATURAL = vol.All(int, vol.Range(min=0))
_TERM = vol.ExactSequence([_NATURAL, vol.Any(int, str)])

SERIES_SCHEMA = vol.Schema(
    {
        vol.Required(KEY_NUM): [_TERM],
        vol.Optional(KEY_DEN): [_TERM],
        vol.Optional(KEY_EXP_DENOMINATOR, default=1): _COUNT,
    }
)
VALUE_SCHEMA = vol.Any(int, str, SERIES_SCHEMA)
FIELD_SCHEMA = vol.Any(
    FIELD_RATIONALS, vol.Schema({vol.Required(KEY_FIELD_PRIME): int})
)

TENSOR_SCHEMA = vol.Schema(
    {
        vol.Required(KEY_DIMS): vol.All([_COUNT], vol.Length(min=1)),
        vol.Optional(KEY_FORMAT): [_COUNT],
        vol.Optional(KEY_FIELD, default=FIELD_RATIONALS): FIELD_SCHEMA,
        vol.Optional(KEY_ENTRIES, default=list): [
            {vol.Required(KEY_INDEX): [_NATURAL], vol.Required(KEY_VALUE): VALUE_SCHEMA}
        ],
    },
    extra=vol.ALLOW_EXTRA,
)

FAMILY_SCHEMA = vol.Schema(
    {
        vol.Required(KEY_VARIABLES): _COUNT,
        vol.Required(KEY_DEGREE): _COUNT,
        vol.Optional(KEY_FIELD, default=FIELD_RATIONALS): FIELD_SCHEMA,
        vol.Required(KEY_TERMS): [
            [
                {
                    vol.Required(KEY_MONOMIAL): [_NATURAL],
                    vol.Required(KEY_COEFF): VALUE_SCHEMA,
                }
            ]
        ],
    },
    extra=vol.ALLOW_EXTRA,
)

ALGEBRA_SCHEMA = vol.Schema(
    vol.Any(
        {
            vol.Required(KEY_PRESENTATION): str,
            vol.Optional(KEY_FIELD, default=FIELD_RATIONALS): FIELD_SCHEMA,
        },
        {
            vol.Required(KEY_DIM): _COUNT,
            vol.Required(KEY_MULT): list,
            vol.Required(KEY_UNIT): list,
            vol.Optional(KEY_FIELD, default=FIELD_RATIONALS): FIELD_SCHEMA,
            vol.Optional("labels"): [str],
        },
    ),
    extra=vol.ALLOW_EXTRA,
)

CERTIFICATE_SCHEMA = vol.Schema(
    {
        vol.Required("kind"): vol.In([KIND_UNRESTRICTION, KIND_CACTUS]),
        vol.Optional(KEY_SCHEMA_VERSION, default=REPORT_SCHEMA_VERSION): int,
        vol.Optional("choice"): vol.In(sorted(MINOR_CHOICES)),
    },
    extra=vol.ALLOW_EXTRA,
)


def _pointer(path: Sequence[Any]) -> str:
    return "".join(f"/{part}" for part in path)


def _validate(schema: vol.Schema, document: Any, prefix: str = "") -> Any:
    try:
        return schema(document)
    except vol.MultipleInvalid as err:
        first = err.errors[0]
        raise SchemaError(prefix + _pointer(first.path), first.msg) from err
    except vol.Invalid as err:
        raise SchemaError(prefix + _pointer(err.path), err.msg) from err


# Fields and values


def parse_field(raw: Any) -> ScalarField:
    """Return the scalar field named by ``"Q"`` or ``{"Fp": p}``."""
    raw = _validate(vol.Schema(FIELD_SCHEMA), raw, f"/{KEY_FIELD}")
    if raw == FIELD_RATIONALS:
        return RATIONALS
    try:
        return ScalarField(raw[KEY_FIELD_PRIME])
    except UnrestrictError as err:
        raise SchemaError(f"/{KEY_FIELD}/{KEY_FIELD_PRIME}", str(err)) from err


def serialize_field(field_: ScalarField) -> Any:
    """Return the document form of a field."""
    return FIELD_RATIONALS if field_.p is None else {KEY_FIELD_PRIME: field_.p}


def _scalar(field_: ScalarField, raw: Any, path: str) -> Any:
    if isinstance(raw, bool) or not isinstance(raw, (int, str)):
        msg = f"expected an integer or a rational string, got {raw!r}"
        raise SchemaError(path, msg)
    try:
        return field_.convert(raw)
    except ValueError as err:
        raise SchemaError(path, str(err)) from err


def _terms(
    field_: ScalarField, raw: Sequence[Sequence[Any]], path: str
) -> dict[int, Any]:
    terms: dict[int, Any] = {}
    for k, (exp, coeff) in enumerate(raw):
        if exp in terms:
            raise SchemaError(f"{path}/{k}/0", f"exponent {exp} appears twice")
        terms[exp] = _scalar(field_, coeff, f"{path}/{k}/1")
    return terms


def parse_value(field_: ScalarField, raw: Any, path: str = "") -> Any:
    """Parse a scalar (domain element) or a series (:class:`SeriesElem`)."""
    if not isinstance(raw, dict):
        return _scalar(field_, raw, path)
    raw = _validate(SERIES_SCHEMA, raw, path)
    num = _terms(field_, raw[KEY_NUM], f"{path}/{KEY_NUM}")
    den = _terms(field_, raw.get(KEY_DEN, []), f"{path}/{KEY_DEN}")
    if KEY_DEN in raw and not any(den.values()):
        raise SchemaError(f"{path}/{KEY_DEN}", "denominator is zero")
    return series_from_polynomial(field_, num, raw[KEY_EXP_DENOMINATOR], den or None)


def serialize_value(ring: Ring, value: Any) -> Any:
    """Return the canonical document form of a scalar or series."""
    base = ring.base
    if not isinstance(value, SeriesElem):
        return base.format(value)
    if value.is_constant:
        return base.format(value.limit_at_zero())
    out: dict[str, Any] = {
        KEY_NUM: [[e, base.format(c)] for e, c in value.numerator_terms()],
    }
    if value.den != value.den.ring.one:
        out[KEY_DEN] = [[e, base.format(c)] for e, c in value.denominator_terms()]
    if value.n != 1:
        out[KEY_EXP_DENOMINATOR] = value.n
    return out


def parse_matrix(ring: Ring, raw: Any, path: str = "") -> np.ndarray:
    """Parse a list of rows."""
    if not isinstance(raw, list) or not raw:
        raise SchemaError(path, "expected a nonempty list of rows")
    if not all(isinstance(row, list) for row in raw):
        raise SchemaError(path, "expected a nonempty list of rows")
    width = len(raw[0])
    rows = []
    for r, row in enumerate(raw):
        if len(row) != width:
            msg = f"row has {len(row)} entries, expected {width}"
            raise SchemaError(f"{path}/{r}", msg)
        rows.append(
            [_ring_value(ring, value, f"{path}/{r}/{c}") for c, value in enumerate(row)]
        )
    return linalg.as_matrix(ring, rows)


def serialize_matrix(ring: Ring, matrix: np.ndarray) -> list[list[Any]]:
    """Return a matrix as a list of rows."""
    return [[serialize_value(ring, x) for x in row] for row in matrix]


def _ring_value(ring: Ring, raw: Any, path: str) -> Any:
    value = parse_value(ring.base, raw, path)
    if isinstance(value, SeriesElem) and not ring.is_series:
        raise SchemaError(path, "series value in a scalar document")
    return ring.convert(value)


# Tensors


def parse_tensor(document: Any) -> Tensor:
    """Return the tensor; it lives over k(t) as soon as one value is a series."""
    raw = _validate(TENSOR_SCHEMA, document)
    field_ = parse_field(raw[KEY_FIELD])
    dims = tuple(raw[KEY_DIMS])
    fmt = tuple(raw.get(KEY_FORMAT) or (1,) * len(dims))
    if len(fmt) != len(dims):
        msg = f"{len(fmt)} entries for {len(dims)} coordinates"
        raise SchemaError(f"/{KEY_FORMAT}", msg)
    shape = tuple(n for n, nu in zip(dims, fmt, strict=True) for _ in range(nu))
    values: dict[tuple[int, ...], Any] = {}
    for k, entry in enumerate(raw[KEY_ENTRIES]):
        path = f"/{KEY_ENTRIES}/{k}"
        index = tuple(entry[KEY_INDEX])
        in_range = all(i < n for i, n in zip(index, shape, strict=True))
        if len(index) != len(shape) or not in_range:
            msg = f"index {list(index)} out of range for shape {list(shape)}"
            raise SchemaError(f"{path}/{KEY_INDEX}", msg)
        if index in values:
            msg = f"index {list(index)} appears twice"
            raise SchemaError(f"{path}/{KEY_INDEX}", msg)
        values[index] = parse_value(field_, entry[KEY_VALUE], f"{path}/{KEY_VALUE}")
    series = any(isinstance(v, SeriesElem) for v in values.values())
    ring: Ring = SeriesField(field_) if series else field_
    try:
        return Tensor.from_entries(ring, dims, values, fmt)
    except UnrestrictError as err:
        raise SchemaError(f"/{KEY_ENTRIES}", str(err)) from err


def parse_degeneration(document: Any) -> Degeneration:
    """Return the tensor of a document as a degeneration."""
    return Degeneration(parse_tensor(document))


def serialize_tensor(T: Tensor) -> dict[str, Any]:
    """Return the canonical document: nonzero entries sorted by index."""
    nonzero = T.nonzero()
    return {
        KEY_DIMS: list(T.dims),
        KEY_FORMAT: list(T.fmt),
        KEY_FIELD: serialize_field(T.ring.base),
        KEY_ENTRIES: [
            {KEY_INDEX: list(index), KEY_VALUE: serialize_value(T.ring, nonzero[index])}
            for index in sorted(nonzero)
        ],
    }


# Polynomial families


def parse_family(document: Any) -> PolyFamily:
    """Return a family of forms of one degree."""
    raw = _validate(FAMILY_SCHEMA, document)
    field_ = parse_field(raw[KEY_FIELD])
    nvars = raw[KEY_VARIABLES]
    members: list[dict[tuple[int, ...], Any]] = []
    for f, terms in enumerate(raw[KEY_TERMS]):
        form: dict[tuple[int, ...], Any] = {}
        for k, term in enumerate(terms):
            path = f"/{KEY_TERMS}/{f}/{k}"
            exponent = tuple(term[KEY_MONOMIAL])
            if len(exponent) != nvars or sum(exponent) != raw[KEY_DEGREE]:
                msg = (
                    f"{list(exponent)} is not of degree {raw[KEY_DEGREE]} "
                    f"in {nvars} variables"
                )
                raise SchemaError(f"{path}/{KEY_MONOMIAL}", msg)
            if exponent in form:
                msg = f"{list(exponent)} appears twice"
                raise SchemaError(f"{path}/{KEY_MONOMIAL}", msg)
            form[exponent] = parse_value(field_, term[KEY_COEFF], f"{path}/{KEY_COEFF}")
        members.append(form)
    return PolyFamily(field_, nvars, raw[KEY_DEGREE], tuple(members))


def serialize_form(
    ring: Ring, form: dict[tuple[int, ...], Any]
) -> list[dict[str, Any]]:
    """Return the terms of a form, sorted by exponent."""
    return [
        {KEY_MONOMIAL: list(exponent), KEY_COEFF: serialize_value(ring, form[exponent])}
        for exponent in sorted(form, reverse=True)
        if form[exponent]
    ]


# Algebras


def parse_algebra(document: Any) -> FiniteAlgebra:
    """Return an algebra from a presentation or from structure constants."""
    raw = _validate(ALGEBRA_SCHEMA, document)
    field_ = parse_field(raw[KEY_FIELD])
    try:
        if KEY_PRESENTATION in raw:
            return algebra_from_monomial_quotient(raw[KEY_PRESENTATION], field_)
        m = raw[KEY_DIM]
        mult = np.array(
            [
                parse_matrix(field_, plane, f"/{KEY_MULT}/{i}")
                for i, plane in enumerate(raw[KEY_MULT])
            ],
            dtype=object,
        )
        unit = parse_matrix(field_, [raw[KEY_UNIT]], f"/{KEY_UNIT}")[0]
        if mult.shape != (m, m, m):
            msg = (
                f"structure constants of shape {list(mult.shape)}, "
                f"expected {m}x{m}x{m}"
            )
            raise SchemaError(f"/{KEY_MULT}", msg)
        return FiniteAlgebra(field_, mult, unit, tuple(raw.get("labels", ())))
    except SchemaError:
        raise
    except (UnrestrictError, ValueError) as err:
        path = f"/{KEY_PRESENTATION}" if KEY_PRESENTATION in raw else f"/{KEY_MULT}"
        raise SchemaError(path, str(err)) from err


def serialize_algebra(A: FiniteAlgebra) -> dict[str, Any]:
    """Return the structure-constant document of an algebra."""
    return {
        KEY_FIELD: serialize_field(A.field),
        KEY_DIM: A.dim,
        "labels": list(A.labels),
        KEY_MULT: [serialize_matrix(A.field, plane) for plane in A.mult],
        KEY_UNIT: [A.field.format(x) for x in A.unit],
    }


# Certificates


def serialize_certificate(
    cert: UnrestrictionCertificate | CactusCertificate,
) -> dict[str, Any]:
    """Return the document of an unrestriction or cactus certificate."""
    if isinstance(cert, CactusCertificate):
        field_ = cert.algebra.field
        return {
            "kind": KIND_CACTUS,
            KEY_SCHEMA_VERSION: REPORT_SCHEMA_VERSION,
            KEY_ALGEBRA: serialize_algebra(cert.algebra),
            KEY_EPS: [field_.format(x) for x in cert.eps.coefficients],
            KEY_MAPS: [serialize_matrix(field_, phi) for phi in cert.maps],
            "smoothable": cert.smoothable,
            "rank_bound": cert.rank_bound,
            "notes": list(cert.notes),
        }
    ring = cert.source.ring
    out: dict[str, Any] = {
        "kind": KIND_UNRESTRICTION,
        KEY_SCHEMA_VERSION: REPORT_SCHEMA_VERSION,
        "source": serialize_tensor(cert.source.tensor),
        "order": list(cert.order),
        "unrestriction": serialize_tensor(cert.unrestriction.tensor),
        KEY_MAPS: [serialize_matrix(ring, phi) for phi in cert.maps_t],
        "limit": serialize_tensor(cert.limit),
        "maps_limit": [serialize_matrix(ring.base, phi) for phi in cert.maps_limit],
        "minor_choices": [list(c) for c in cert.minor_choices],
        "choice": str(cert.choice),
        KEY_EXP_DENOMINATOR: cert.exp_denominator,
        "minimal_border_rank_claim": cert.minimal_border_rank_claim,
        "notes": list(cert.notes),
    }
    if cert.scale is not None:
        out["scale"] = serialize_value(ring, cert.scale)
    return out


def _series_tensor(document: Any, path: str) -> Degeneration:
    try:
        return parse_degeneration(document)
    except SchemaError as err:
        detail = str(err).removeprefix(f"{err.path or '/'}: ")
        raise SchemaError(f"{path}{err.path}", detail) from err


def _maps(ring: Ring, raw: dict[str, Any]) -> tuple[np.ndarray, ...]:
    return tuple(
        parse_matrix(ring, phi, f"/{KEY_MAPS}/{i}")
        for i, phi in enumerate(raw.get(KEY_MAPS) or [])
    )


def certificate_from_document(
    document: Any,
) -> UnrestrictionCertificate | CactusCertificate:
    """Rebuild a certificate; the restriction identity is checked by the caller."""
    raw = _validate(CERTIFICATE_SCHEMA, document)
    if raw["kind"] == KIND_CACTUS:
        algebra = parse_algebra(raw.get(KEY_ALGEBRA))
        field_ = algebra.field
        eps_row = parse_matrix(field_, [raw.get(KEY_EPS)], f"/{KEY_EPS}")[0]
        maps = _maps(field_, raw)
        if not maps:
            msg = "a cactus certificate needs at least one map"
            raise SchemaError(f"/{KEY_MAPS}", msg)
        return CactusCertificate(
            algebra,
            Functional(field_, eps_row),
            maps,
            smoothable=bool(raw.get("smoothable", False)),
            notes=tuple(raw.get("notes", ())),
        )
    source = _series_tensor(raw.get("source"), "/source")
    unrestriction = _series_tensor(raw.get("unrestriction"), "/unrestriction")
    ring = source.ring
    maps_t = _maps(ring, raw)
    if len(maps_t) != source.tensor.order:
        msg = f"{len(maps_t)} maps for {source.tensor.order} coordinates"
        raise SchemaError(f"/{KEY_MAPS}", msg)
    scale = raw.get("scale")
    return UnrestrictionCertificate(
        source=source,
        order=tuple(raw.get("order", range(source.tensor.order))),
        unrestriction=unrestriction,
        maps_t=maps_t,
        limit=limit_tensor(unrestriction.tensor),
        maps_limit=tuple(linalg.limit_matrix(ring, phi) for phi in maps_t),
        minor_choices=tuple(
            tuple(c) for c in raw.get("minor_choices", [()] * len(maps_t))
        ),
        choice=MinorChoice(raw.get("choice", MinorChoice.LEX_SMALLEST)),
        scale=(
            ring.convert(parse_value(ring.base, scale, "/scale"))
            if scale is not None
            else None
        ),
        exp_denominator=int(raw.get(KEY_EXP_DENOMINATOR, 1)),
        minimal_border_rank_claim=raw.get("minimal_border_rank_claim", "unknown"),
        notes=tuple(raw.get("notes", ())),
    )
