"""
Finite unital commutative algebras given by structure constants.

An algebra of dimension ``m`` stores ``mult[i, j, k]``, the coefficient of
``e_k`` in ``e_i e_j``, and the coordinates of its unit. Functionals are
coordinate vectors in the dual basis. From these the module builds the
multiplication, evaluation and unit tensors used by the cactus side of the
toolkit.
"""

from __future__ import annotations

import itertools
import logging
import math
import re
from collections import deque
from dataclasses import dataclass
from typing import TYPE_CHECKING, Any

import numpy as np
from sympy import Poly, Symbol, groebner
from sympy.parsing.sympy_parser import (
    convert_xor,
    parse_expr,
    standard_transformations,
)

from . import linalg
from .const import MAX_ALGEBRA_DIM
from .exact import RATIONALS, ScalarField
from .exceptions import PreconditionFailure, ShapeMismatch, UnsupportedSize
from .tensor import Tensor, restrict

if TYPE_CHECKING:
    import random
    from collections.abc import Sequence

_LOGGER = logging.getLogger(__name__)

_PRESENTATION = re.compile(r"^\s*k\s*\[(?P<vars>[^\]]*)\]\s*/\s*\((?P<gens>.*)\)\s*$")
_IDEAL_POWER = re.compile(r"^\((?P<vars>[^()]*)\)\s*\^\s*(?P<exp>\d+)$")
_TRANSFORMATIONS = (*standard_transformations, convert_xor)


@dataclass(frozen=True, slots=True, eq=False)
class FiniteAlgebra:
    """A finite commutative unital algebra over a scalar field."""

    field: ScalarField
    mult: np.ndarray
    unit: np.ndarray
    labels: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        """Convert the data and check the algebra axioms."""
        mult = linalg.convert_array(self.field, np.asarray(self.mult, dtype=object))
        unit = linalg.convert_array(self.field, np.asarray(self.unit, dtype=object))
        m = unit.shape[0] if unit.ndim == 1 else -1
        if m < 1 or mult.shape != (m, m, m):
            msg = (
                f"structure constants {mult.shape} do not fit "
                f"a unit of shape {unit.shape}"
            )
            raise ShapeMismatch(msg)
        if m > MAX_ALGEBRA_DIM:
            msg = f"algebras of dimension {m} exceed the limit {MAX_ALGEBRA_DIM}"
            raise UnsupportedSize(msg)
        object.__setattr__(self, "mult", mult)
        object.__setattr__(self, "unit", unit)
        if not self.labels:
            object.__setattr__(self, "labels", tuple(f"e{i + 1}" for i in range(m)))
        elif len(self.labels) != m:
            msg = f"{len(self.labels)} labels for an algebra of dimension {m}"
            raise ShapeMismatch(msg)
        if not linalg.arrays_equal(mult, np.swapaxes(mult, 0, 1)):
            msg = "structure constants are not commutative"
            raise PreconditionFailure(msg)
        acting = np.tensordot(unit, mult, axes=([0], [0]))
        if not linalg.arrays_equal(acting, linalg.identity(self.field, m)):
            msg = "the unit does not act as the identity"
            raise PreconditionFailure(msg)
        # (e_i e_j) e_k against e_i (e_j e_k), both indexed (i, j, k, n)
        left = np.tensordot(mult, mult, axes=([2], [0]))
        right = np.transpose(np.tensordot(mult, mult, axes=([2], [1])), (2, 0, 1, 3))
        if not linalg.arrays_equal(left, right):
            msg = "structure constants are not associative"
            raise PreconditionFailure(msg)

    @property
    def dim(self) -> int:
        """Return the dimension over the base field."""
        return self.unit.shape[0]

    def element(self, coeffs: Sequence[Any]) -> np.ndarray:
        """Return an element from its coordinates."""
        vector = linalg.convert_array(self.field, np.asarray(coeffs, dtype=object))
        if vector.shape != (self.dim,):
            msg = f"element of shape {vector.shape} in an algebra of dim {self.dim}"
            raise ShapeMismatch(msg)
        return vector

    def basis_element(self, k: int) -> np.ndarray:
        """Return ``e_k``."""
        vector = linalg.zeros(self.field, (self.dim,))
        vector[k] = self.field.one
        return vector

    def multiply(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Return the product ``a b``."""
        left = np.tensordot(a, self.mult, axes=([0], [0]))
        product = np.tensordot(b, left, axes=([0], [0]))
        return linalg.convert_array(self.field, product)

    def left_matrix(self, a: np.ndarray) -> np.ndarray:
        """Return the matrix of ``b ↦ a b`` acting on coordinate columns."""
        return linalg.transpose(
            linalg.convert_array(
                self.field, np.tensordot(a, self.mult, axes=([0], [0]))
            )
        )

    def power(self, a: np.ndarray, n: int) -> np.ndarray:
        """Return ``a**n`` by repeated squaring."""
        result = np.array(self.unit, dtype=object)
        square = np.array(a, dtype=object)
        while n:
            if n & 1:
                result = self.multiply(result, square)
            n >>= 1
            if n:
                square = self.multiply(square, square)
        return result

    def is_unit_element(self, a: np.ndarray) -> bool:
        """Return True if ``a`` is invertible."""
        return linalg.is_invertible(self.field, self.left_matrix(a))

    def inverse_element(self, a: np.ndarray) -> np.ndarray:
        """Return ``a⁻¹``; non-units raise PreconditionFailure."""
        solution = linalg.solve(self.field, self.left_matrix(a), self.unit)
        if solution is None:
            msg = "element is not invertible"
            raise PreconditionFailure(msg)
        return solution

    def nilradical(self) -> list[np.ndarray]:
        """
        Return a basis of the nilradical.

        In characteristic zero it is the radical of the trace form. Over F_p
        the map ``a ↦ a^(p^k)`` is linear and, once ``p^k ≥ m``, its kernel is
        exactly the set of nilpotents.
        """
        m = self.dim
        field_ = self.field
        if field_.p is None:
            basis = [self.basis_element(i) for i in range(m)]
            products = [[self.multiply(a, b) for b in basis] for a in basis]
            traces = [
                [
                    sum(
                        np.diagonal(self.left_matrix(products[i][j])),
                        field_.zero,
                    )
                    for j in range(m)
                ]
                for i in range(m)
            ]
            return linalg.nullspace(field_, linalg.as_matrix(field_, traces))
        exponent = field_.p ** math.ceil(math.log(max(m, 2), field_.p))
        columns = [self.power(self.basis_element(i), exponent) for i in range(m)]
        powers = linalg.transpose(np.array(columns, dtype=object))
        return linalg.nullspace(field_, powers)

    def nilradical_dimension(self) -> int:
        """Return the dimension of the nilradical."""
        return len(self.nilradical())

    def is_local(self) -> bool:
        """Return True for local algebras with residue field the base field."""
        return self.nilradical_dimension() == self.dim - 1

    def is_reduced(self) -> bool:
        """Return True if there are no nonzero nilpotents."""
        return self.nilradical_dimension() == 0


@dataclass(frozen=True, slots=True, eq=False)
class Functional:
    """A linear functional on an algebra, in dual-basis coordinates."""

    field: ScalarField
    coefficients: np.ndarray

    def __post_init__(self) -> None:
        """Convert the coordinates."""
        raw = np.asarray(self.coefficients, dtype=object)
        coeffs = linalg.convert_array(self.field, raw)
        if coeffs.ndim != 1:
            msg = f"functional of shape {coeffs.shape} is not a vector"
            raise ShapeMismatch(msg)
        object.__setattr__(self, "coefficients", coeffs)

    @classmethod
    def dual_basis(cls, field_: ScalarField, m: int, k: int) -> Functional:
        """Return ``e_k^*``."""
        coeffs = linalg.zeros(field_, (m,))
        coeffs[k] = field_.one
        return cls(field_, coeffs)

    @property
    def dim(self) -> int:
        """Return the dimension of the algebra it is defined on."""
        return self.coefficients.shape[0]

    def __call__(self, a: np.ndarray) -> Any:
        """Evaluate on an element."""
        terms = (c * x for c, x in zip(self.coefficients, a, strict=True))
        return sum(terms, self.field.zero)

    def scaled_by(self, A: FiniteAlgebra, u: np.ndarray) -> Functional:
        """Return ``u·ε``, the functional ``a ↦ ε(u a)``."""
        _check_functional(A, self)
        transposed = linalg.transpose(A.left_matrix(u))
        coeffs = linalg.matmul(self.field, transposed, self.coefficients)
        return Functional(self.field, coeffs)

    def is_zero(self) -> bool:
        """Return True for the zero functional."""
        return linalg.is_zero(self.coefficients)


def _check_functional(A: FiniteAlgebra, eps: Functional) -> None:
    if eps.dim != A.dim or eps.field != A.field:
        msg = (
            f"functional on a {eps.dim}-dimensional space does not fit "
            f"the algebra of dimension {A.dim}"
        )
        raise ShapeMismatch(msg)


def _check_order(d: int, low: int) -> None:
    if d < low:
        msg = f"order {d} is below {low}"
        raise ShapeMismatch(msg)


def truncated_polynomial_algebra(
    n: int, field_: ScalarField = RATIONALS
) -> FiniteAlgebra:
    """Return ``k[x]/(x^n)`` in the basis ``1, x, ..., x^(n-1)``."""
    if n < 1:
        msg = f"truncation degree {n} must be positive"
        raise ShapeMismatch(msg)
    mult = linalg.zeros(field_, (n, n, n))
    for i in range(n):
        for j in range(n - i):
            mult[i, j, i + j] = field_.one
    labels = tuple("1" if i == 0 else "x" if i == 1 else f"x^{i}" for i in range(n))
    return FiniteAlgebra(field_, mult, linalg.identity(field_, n)[0], labels)


def split_algebra(r: int, field_: ScalarField = RATIONALS) -> FiniteAlgebra:
    """Return ``k^r`` in the basis of primitive idempotents."""
    if r < 1:
        msg = f"number of factors {r} must be positive"
        raise ShapeMismatch(msg)
    mult = linalg.zeros(field_, (r, r, r))
    for i in range(r):
        mult[i, i, i] = field_.one
    unit = np.full((r,), field_.one, dtype=object)
    return FiniteAlgebra(field_, mult, unit, tuple(f"u{i + 1}" for i in range(r)))


def product_algebra(A: FiniteAlgebra, B: FiniteAlgebra) -> FiniteAlgebra:
    """Return ``A × B`` with the basis of A followed by that of B."""
    if A.field != B.field:
        msg = f"cannot multiply algebras over {A.field} and {B.field}"
        raise ShapeMismatch(msg)
    a, b = A.dim, B.dim
    mult = linalg.zeros(A.field, (a + b,) * 3)
    mult[:a, :a, :a] = A.mult
    mult[a:, a:, a:] = B.mult
    unit = np.concatenate([A.unit, B.unit])
    labels = tuple(f"({x},0)" for x in A.labels) + tuple(f"(0,{y})" for y in B.labels)
    return FiniteAlgebra(A.field, mult, unit, labels)


def _split_generators(text: str) -> list[str]:
    parts: list[str] = []
    depth = 0
    current = ""
    for char in text:
        if char == "," and depth == 0:
            parts.append(current.strip())
            current = ""
            continue
        depth += (char == "(") - (char == ")")
        current += char
    if current.strip():
        parts.append(current.strip())
    return parts


def _explicit_products(text: str, names: Sequence[str]) -> str:
    """Insert ``*`` between juxtaposed factors such as ``xy`` or ``2x^2y``."""
    pattern = "|".join(re.escape(n) for n in sorted(names, key=len, reverse=True))
    tokens = re.findall(rf"{pattern}|\d+|\S", text)
    out: list[str] = []
    for token in tokens:
        if out and (out[-1] in names or out[-1].isdigit() or out[-1] == ")") and (
            token in names or token == "("
        ):
            out.append("*")
        out.append(token)
    return "".join(out)


def _monomial_label(exponent: tuple[int, ...], names: Sequence[str]) -> str:
    factors = [
        name if e == 1 else f"{name}^{e}"
        for name, e in zip(names, exponent, strict=True)
        if e
    ]
    return "*".join(factors) or "1"


def algebra_from_monomial_quotient(
    text: str, field_: ScalarField = RATIONALS
) -> FiniteAlgebra:
    """
    Return the quotient named by a presentation such as ``k[x,y]/(x^2,xy,y^2)``.

    Generators may be polynomials in the listed variables or ideal powers
    ``(x,y)^k``. The basis consists of the standard monomials of a grevlex
    Gröbner basis, listed by degree.
    """
    match = _PRESENTATION.match(text)
    if match is None:
        msg = f"cannot read the presentation {text!r}; expected k[x,...]/(...)"
        raise ValueError(msg)
    names = [v.strip() for v in match["vars"].split(",") if v.strip()]
    if not names or len(set(names)) != len(names):
        msg = f"bad variable list in {text!r}"
        raise ValueError(msg)
    symbols = [Symbol(name) for name in names]
    local = dict(zip(names, symbols, strict=True))
    generators: list[Any] = []
    for part in _split_generators(match["gens"]):
        power = _IDEAL_POWER.match(part)
        if power is not None:
            try:
                ideal_vars = [local[v.strip()] for v in power["vars"].split(",")]
            except KeyError as err:
                msg = f"unknown variable {err.args[0]!r} in {part!r}"
                raise ValueError(msg) from err
            generators.extend(
                math.prod(combo)
                for combo in itertools.combinations_with_replacement(
                    ideal_vars, int(power["exp"])
                )
            )
            continue
        try:
            expr = parse_expr(
                _explicit_products(part, names),
                local_dict=local,
                transformations=_TRANSFORMATIONS,
            )
        except (SyntaxError, TypeError, ValueError) as err:
            msg = f"cannot read the generator {part!r}"
            raise ValueError(msg) from err
        if not expr.free_symbols <= set(symbols):
            msg = f"generator {part!r} uses variables outside {names}"
            raise ValueError(msg)
        generators.append(expr)
    options: dict[str, Any] = {"order": "grevlex"}
    if field_.p is None:
        options["domain"] = field_.domain
    else:
        options["modulus"] = field_.p
    basis = groebner(generators, *symbols, **options)
    leading = [Poly(g, *symbols).monoms(order="grevlex")[0] for g in basis.exprs]
    if any(not any(lead) for lead in leading):
        msg = f"the ideal of {text!r} is the whole ring"
        raise PreconditionFailure(msg)

    def is_standard(exponent: tuple[int, ...]) -> bool:
        return not any(
            all(e >= b for e, b in zip(exponent, lead, strict=True))
            for lead in leading
        )

    start = (0,) * len(symbols)
    standard: list[tuple[int, ...]] = [start]
    queue = deque([start])
    seen = {start}
    while queue:
        current = queue.popleft()
        for k in range(len(symbols)):
            nxt = tuple(e + (j == k) for j, e in enumerate(current))
            if nxt in seen or not is_standard(nxt):
                continue
            seen.add(nxt)
            standard.append(nxt)
            queue.append(nxt)
            if len(standard) > MAX_ALGEBRA_DIM:
                msg = f"{text!r} is infinite or exceeds dimension {MAX_ALGEBRA_DIM}"
                raise UnsupportedSize(msg)
    standard.sort(key=lambda e: (sum(e), [-x for x in e]))
    index = {e: k for k, e in enumerate(standard)}
    m = len(standard)
    mult = linalg.zeros(field_, (m, m, m))
    for i, a in enumerate(standard):
        for j in range(i, m):
            b = standard[j]
            product = math.prod(
                s ** (x + y) for s, x, y in zip(symbols, a, b, strict=True)
            )
            _, remainder = basis.reduce(product)
            for exponent, coeff in Poly(remainder, *symbols).terms():
                mult[i, j, index[exponent]] = field_.convert(coeff)
                mult[j, i, index[exponent]] = mult[i, j, index[exponent]]
    labels = tuple(_monomial_label(e, names) for e in standard)
    _LOGGER.debug("Presentation %s has standard monomials %s", text, labels)
    return FiniteAlgebra(field_, mult, linalg.identity(field_, m)[0], labels)


def _products(A: FiniteAlgebra, k: int) -> np.ndarray:
    """Return coordinates of ``e_{i1} ... e_{ik}`` indexed ``(i1, ..., ik, n)``."""
    array = linalg.identity(A.field, A.dim)
    for _ in range(k - 1):
        array = np.tensordot(array, A.mult, axes=([-1], [0]))
    return array


def multiplication_tensor(A: FiniteAlgebra, d: int = 3) -> Tensor:
    """Return the tensor of ``A^{×(d-1)} → A``; the last coordinate is A itself."""
    _check_order(d, 2)
    return Tensor(A.field, _products(A, d - 1))


def evaluation_tensor(A: FiniteAlgebra, eps: Functional, d: int = 3) -> Tensor:
    """Return ``(a_1, ..., a_d) ↦ ε(a_1 ⋯ a_d)``."""
    _check_order(d, 2)
    _check_functional(A, eps)
    values = np.tensordot(_products(A, d), eps.coefficients, axes=([-1], [0]))
    return Tensor(A.field, values)


def unit_tensor(r: int, d: int = 3, field_: ScalarField = RATIONALS) -> Tensor:
    """Return ``Σ e_i^{⊗d}`` in ``(k^r)^{⊗d}``."""
    _check_order(d, 2)
    values = {(i,) * d: field_.one for i in range(r)}
    return Tensor.from_entries(field_, (r,) * d, values)


def bilinear_form(A: FiniteAlgebra, eps: Functional) -> np.ndarray:
    """Return the Gram matrix of ``(a, b) ↦ ε(ab)``."""
    _check_functional(A, eps)
    gram = np.tensordot(A.mult, eps.coefficients, axes=([2], [0]))
    return linalg.convert_array(A.field, gram)


def is_dual_generator(A: FiniteAlgebra, eps: Functional) -> bool:
    """Return True if ``A·ε = A^∨``."""
    return linalg.is_invertible(A.field, bilinear_form(A, eps))


def multiplication_to_evaluation(A: FiniteAlgebra, eps: Functional) -> np.ndarray:
    """
    Return the matrix of ``a ↦ a·ε`` from A to A^∨.

    Restricting the last coordinate of the multiplication tensor by this map
    gives the evaluation tensor of ``ε``; it is invertible exactly when ``ε``
    is a dual generator.
    """
    return bilinear_form(A, eps)


def is_gorenstein(A: FiniteAlgebra, rng: random.Random) -> Functional | None:
    """
    Return a dual generator if A is Gorenstein, else None.

    The Gram matrix of a generic functional is a linear pencil in the dual
    coordinates; its generic rank decides the question exactly and a witness
    is drawn from that pencil.
    """
    m = A.dim
    pencil = [
        linalg.convert_array(A.field, np.array(A.mult[:, :, k], dtype=object))
        for k in range(m)
    ]
    coeffs = linalg.full_rank_combination(A.field, pencil, m, rng)
    if coeffs is None:
        _LOGGER.debug("Algebra %s is not Gorenstein", A.labels)
        return None
    return Functional(A.field, coeffs)


@dataclass(frozen=True, slots=True, eq=False)
class GorensteinQuotient:
    """The quotient ``A/I`` by the kernel of ``(a, b) ↦ ε(ab)``."""

    algebra: FiniteAlgebra
    eps: Functional
    projection: np.ndarray
    kernel: tuple[np.ndarray, ...]


def gorenstein_quotient(A: FiniteAlgebra, eps: Functional) -> GorensteinQuotient:
    """
    Divide by the largest ideal on which ``ε`` vanishes.

    ``projection`` maps A-coordinates to quotient coordinates. The evaluation
    tensor of ``(A, ε)`` is the restriction of that of the quotient by the
    transpose of ``projection`` on every coordinate.
    """
    field_ = A.field
    m = A.dim
    kernel = linalg.nullspace(field_, bilinear_form(A, eps))
    if len(kernel) == m:
        msg = "the zero functional has no Gorenstein quotient"
        raise PreconditionFailure(msg)
    columns = list(kernel)
    complement: list[int] = []
    for k in range(m):
        trial = [A.basis_element(k), *columns]
        spanned = linalg.transpose(np.array(trial, dtype=object))
        if linalg.rank(field_, spanned) == len(trial):
            complement.append(k)
            columns = trial
    basis = [A.basis_element(k) for k in complement] + list(kernel)
    change = linalg.transpose(np.array(basis, dtype=object))
    projection = linalg.inverse(field_, change)[: len(complement), :]
    size = len(complement)
    mult = linalg.zeros(field_, (size, size, size))
    for a, i in enumerate(complement):
        for b, j in enumerate(complement):
            column = np.array(A.mult[i, j, :], dtype=object)
            mult[a, b, :] = linalg.matmul(field_, projection, column)
    unit = linalg.matmul(field_, projection, A.unit)
    labels = tuple(A.labels[k] for k in complement)
    quotient = FiniteAlgebra(field_, mult, unit, labels)
    induced = Functional(field_, [eps.coefficients[k] for k in complement])
    back = linalg.transpose(projection)
    lifted = restrict(evaluation_tensor(quotient, induced, 2), [back, back])
    if lifted != evaluation_tensor(A, eps, 2):
        msg = "quotient does not reproduce the bilinear form"
        raise AssertionError(msg)
    _LOGGER.debug("Gorenstein quotient keeps basis %s of %s", labels, A.labels)
    return GorensteinQuotient(quotient, induced, projection, tuple(kernel))


def dual_generator_isomorphism(
    A: FiniteAlgebra, eps: Functional, u: np.ndarray, d: int = 3
) -> list[np.ndarray]:
    """
    Return invertible maps taking the evaluation tensor of ``ε`` to that of ``u·ε``.

    The maps are multiplication by ``u`` on the first coordinate and the
    identity elsewhere; the identity is checked before returning.
    """
    if not A.is_unit_element(u):
        msg = "rescaling element is not a unit"
        raise PreconditionFailure(msg)
    identity = linalg.identity(A.field, A.dim)
    maps = [linalg.transpose(A.left_matrix(u))] + [identity] * (d - 1)
    source = evaluation_tensor(A, eps, d)
    if restrict(source, maps) != evaluation_tensor(A, eps.scaled_by(A, u), d):
        msg = "rescaling maps do not match the evaluation tensors"
        raise AssertionError(msg)
    return maps
