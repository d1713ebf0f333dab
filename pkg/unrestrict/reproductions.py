"""Registry of worked examples, each re-derived from scratch and checked."""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any

from . import gallery
from .algebra import (
    Functional,
    evaluation_tensor,
    gorenstein_quotient,
    is_gorenstein,
    multiplication_tensor,
)
from .analysis import (
    centroid,
    is_jointly_spanning,
    is_minimal_border_rank,
    is_one_generic_on,
    is_regular,
    partial_restriction_conciseness,
)
from .const import configured_seed
from .documents import parse_degeneration, parse_tensor
from .exact import RATIONALS
from .exceptions import UnknownExample
from .segre import unrestrict_full
from .sigma2 import (
    bb_motive,
    csigma2_motive_formula,
    enumerate_fixed_points,
    expected_fixed_point_count,
    fixed_points_in_rank_one_fiber,
    rank_one_fiber_motive,
)
from .sigma2_scan import census
from .tensor import (
    as_segre,
    is_fully_concise,
    is_gl_equivalent_via,
    render_pencil,
    restrict,
)
from .veronese import unrestrict_symmetric

if TYPE_CHECKING:
    from collections.abc import Callable

_LOGGER = logging.getLogger(__name__)


@dataclass(slots=True)
class Check:
    """One assertion of a reproduction."""

    name: str
    passed: bool
    expected: Any = None
    actual: Any = None

    def as_dict(self) -> dict[str, Any]:
        """Return the check, with the diff only when it failed."""
        out: dict[str, Any] = {"name": self.name, "passed": self.passed}
        if not self.passed:
            out["expected"] = self.expected
            out["actual"] = self.actual
        return out


@dataclass(slots=True)
class ReproductionReport:
    """Outcome of one registered example."""

    name: str
    checks: list[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        """Return True if every check passed."""
        return all(c.passed for c in self.checks)

    def check(self, name: str, actual: Any, expected: Any = True) -> None:
        """Record ``actual == expected``."""
        passed = bool(actual == expected)
        if not passed:
            _LOGGER.warning(
                "%s: check %s failed (expected %s, got %s)",
                self.name,
                name,
                expected,
                actual,
            )
        self.checks.append(Check(name, passed, _plain(expected), _plain(actual)))

    def as_dict(self) -> dict[str, Any]:
        """Return the JSON-friendly report."""
        return {
            "name": self.name,
            "passed": self.passed,
            "checks": [c.as_dict() for c in self.checks],
        }


def _plain(value: Any) -> Any:
    if isinstance(value, bool | int | str | None):
        return value
    if isinstance(value, list | tuple):
        return [_plain(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    return str(value)


def _form_text(limit: dict[tuple[int, ...], Any]) -> dict[str, str]:
    return {
        "*".join(f"x{k + 1}^{e}" for k, e in enumerate(exp) if e): RATIONALS.format(c)
        for exp, c in sorted(limit.items())
    }


def small_cw(report: ReproductionReport, rng: random.Random) -> None:
    """Perturbed witness of ``x1 x2 x3`` unrestricts to ``x1 x2 x3 + x4 x1^2 / 2``."""
    del rng
    result = unrestrict_symmetric(gallery.small_cw_degeneration(), 4, 3, RATIONALS)
    expected = _form_text(gallery.small_cw_limit())
    report.check("limit", _form_text(result.limit), expected)
    report.check("integral exponents", result.exp_denominator, 1)
    minimal = is_minimal_border_rank(as_segre(result.limit_tensor()))
    report.check("minimal border rank", minimal)


def order_matters(report: ReproductionReport, rng: random.Random) -> None:
    """Columns first and rows first give non-isomorphic limits."""
    del rng
    degeneration = gallery.order_matters()
    columns_first, rows_first = gallery.order_matters_limits()
    first = unrestrict_full(degeneration, gallery.ORDER_COLUMNS_FIRST)
    second = unrestrict_full(degeneration, gallery.ORDER_ROWS_FIRST)
    shipped = parse_degeneration(gallery.shipped_document("order_matters"))
    report.check("shipped document", shipped.tensor == degeneration.tensor)
    expected = render_pencil(columns_first)
    report.check("columns first limit", render_pencil(first.limit), expected)
    expected = render_pencil(rows_first)
    report.check("rows first limit", render_pencil(second.limit), expected)
    split = centroid(first.limit).algebra.is_reduced()
    report.check("columns first centroid is split", split)
    nilpotent = centroid(second.limit).is_nilpotent
    report.check("rows first centroid is nilpotent", nilpotent)


def bini(report: ReproductionReport, rng: random.Random) -> None:
    """Bini's degeneration yields a concise limit with a five-dimensional centroid."""
    del rng
    cert = unrestrict_full(gallery.bini_degeneration())
    report.check("restriction identity", cert.restriction_identity_holds())
    restricted = restrict(cert.limit, cert.maps_limit)
    report.check("limit restricts to the limit", restricted == cert.source.limit())
    report.check("limit concise", is_fully_concise(cert.limit))
    report.check("centroid dimension", centroid(cert.limit).dim, 5)
    display = gallery.bini_unrestriction()
    restricted = restrict(display, gallery.bini_target_maps())
    report.check("display form restricts", restricted == gallery.bini_target())
    report.check("display form centroid dimension", centroid(display).dim, 5)


def wedge(report: ReproductionReport, rng: random.Random) -> None:
    """The padded wedge has a concise minimal border rank unrestriction."""
    del rng
    unrestriction = gallery.wedge_unrestriction()
    shipped = parse_tensor(gallery.shipped_document("wedge"))
    report.check("shipped document", shipped == unrestriction)
    restricted = restrict(unrestriction, gallery.wedge_maps())
    report.check("restriction", restricted == gallery.wedge_tensor())
    report.check("concise", is_fully_concise(unrestriction))
    report.check("centroid dimension", centroid(unrestriction).dim, 5)
    report.check("minimal border rank", is_minimal_border_rank(unrestriction))


def joint_surjectivity(report: ReproductionReport, rng: random.Random) -> None:
    """Regular restrictions onto ``<1, x>`` of k[x]/(x^5) are not jointly spanning."""
    del rng
    algebra = gallery.joint_surjectivity_algebra()
    phi = gallery.joint_surjectivity_map()
    report.check("regular", is_regular(phi, algebra))
    spanning = is_jointly_spanning([phi] * 3, algebra)
    report.check("jointly spanning", spanning, expected=False)
    T = evaluation_tensor(algebra, Functional.dual_basis(RATIONALS, 5, 4), 4)
    flags = partial_restriction_conciseness(T, {1: phi, 2: phi, 3: phi})
    report.check("partial restriction concise on the first factor", flags, {0: False})


def eps3(report: ReproductionReport, rng: random.Random) -> None:
    """Evaluation tensors and quotients of k[ε]/(ε^3), and a non-Gorenstein algebra."""
    algebra = gallery.eps3_algebra()
    E = evaluation_tensor(algebra, gallery.eps3_dual_generator())
    maps = gallery.eps3_cubic_maps()
    cubic = is_gl_equivalent_via(gallery.eps3_cubic(), E, maps)
    report.check("cubic x^2z + xy^2", cubic)
    for k, expected in gallery.quotient_cubics().items():
        quotient = gorenstein_quotient(algebra, Functional.dual_basis(RATIONALS, 3, k))
        report.check(f"quotient by (e_{k})* dimension", quotient.algebra.dim, k + 1)
        cubic = evaluation_tensor(quotient.algebra, quotient.eps)
        report.check(f"quotient by (e_{k})* cubic", cubic == expected)
    other = gallery.non_gorenstein_algebra()
    gorenstein = is_gorenstein(other, rng) is not None
    report.check("k[x,y]/(x,y)^2 Gorenstein", gorenstein, expected=False)
    M = multiplication_tensor(other)
    report.check(
        "k[x,y]/(x,y)^2 one-generic coordinates",
        [is_one_generic_on(M, i, rng) for i in range(3)],
        [True, True, False],
    )


def sigma2_small(report: ReproductionReport, rng: random.Random) -> None:
    """Fixed points, cells and point counts of the rank two secant for d = 3, 4."""
    del rng
    for d in (3, 4):
        points = enumerate_fixed_points(d)
        expected_count = expected_fixed_point_count(d)
        report.check(f"d={d} fixed points", len(points), expected_count)
        motive = bb_motive(d)
        expected = csigma2_motive_formula(d).coefficients
        report.check(f"d={d} cells match the formula", motive.coefficients, expected)
        fiber = bb_motive(d, points=fixed_points_in_rank_one_fiber(d))
        expected = rank_one_fiber_motive(d).coefficients
        report.check(f"d={d} rank one fibre", fiber.coefficients, expected)
        report.check(f"d={d} L coefficient", motive.coefficients[1], d + 1)
    counts = census(3, 2, threads=1)
    report.check("d=3 over F_2 matches the formulas", counts["discrepancies"], [])


REGISTRY: dict[str, Callable[[ReproductionReport, random.Random], None]] = {
    "smallCW": small_cw,
    "order_matters": order_matters,
    "bini": bini,
    "wedge": wedge,
    "jointSurjectivity": joint_surjectivity,
    "eps3": eps3,
    "sigma2_small": sigma2_small,
}


def run_reproduction(name: str, seed: int | None = None) -> ReproductionReport:
    """Run one registered example."""
    try:
        runner = REGISTRY[name]
    except KeyError as err:
        msg = f"unknown example {name!r}; known: {', '.join(REGISTRY)}"
        raise UnknownExample(msg) from err
    report = ReproductionReport(name)
    runner(report, random.Random(configured_seed() if seed is None else seed))
    _LOGGER.info("Reproduction %s: %s", name, "pass" if report.passed else "FAIL")
    return report


def run_all(seed: int | None = None) -> list[ReproductionReport]:
    """Run every registered example in registry order."""
    return [run_reproduction(name, seed) for name in REGISTRY]
