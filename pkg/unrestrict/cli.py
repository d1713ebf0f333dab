"""Command-line front end; JSON on stdout or ``--out``, logs on stderr."""

from __future__ import annotations

import argparse
import json
import logging
import random
import sys
from pathlib import Path
from typing import TYPE_CHECKING, Any

from . import documents
from .algebra import (
    Functional,
    evaluation_tensor,
    gorenstein_quotient,
    is_gorenstein,
    multiplication_tensor,
)
from .analysis import (
    CactusCertificate,
    analyze,
    build_cactus_tensor,
    minimal_border_rank_verdict,
    verify_cactus_certificate,
)
from .const import (
    KEY_ALGEBRA,
    KEY_EPS,
    KEY_FORMAT,
    KEY_TERMS,
    MINOR_CHOICES,
    configured_seed,
    configured_threads,
)
from .exceptions import SchemaError, UnrestrictError
from .log import setup_logging
from .reproductions import REGISTRY, run_all, run_reproduction
from .segre import (
    CLAIM_MINIMAL,
    CLAIM_NOT_MINIMAL,
    MinorChoice,
    UnrestrictionCertificate,
    unrestrict_full,
)
from .sigma2 import (
    bb_motive,
    classify_rank2,
    csigma2_motive_formula,
    enumerate_fixed_points,
    expected_fixed_point_count,
    sigma2_motive_formula,
    tangent_weights,
)
from .sigma2_scan import census
from .tensor import concise_coordinates, render_pencil
from .veronese import unrestrict_family, unrestrict_partial

if TYPE_CHECKING:
    from collections.abc import Callable, Sequence

_LOGGER = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_ERROR = 2


# Input helpers


def _load(path: str) -> Any:
    try:
        with Path(path).open(encoding="utf-8") as handle:
            return json.load(handle)
    except json.JSONDecodeError as err:
        raise SchemaError("", f"{path} is not valid JSON: {err.msg}") from err


def _emit(args: argparse.Namespace, payload: Any) -> None:
    text = json.dumps(payload, indent=2, ensure_ascii=False) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        _LOGGER.info("Wrote %s", args.out)
    else:
        sys.stdout.write(text)


def _int_list(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError as err:
        msg = f"expected a comma separated list of integers, got {text!r}"
        raise argparse.ArgumentTypeError(msg) from err


def _order(args: argparse.Namespace) -> list[int] | None:
    """Return the 0-based coordinate order from the 1-based ``--order`` flag."""
    return [k - 1 for k in args.order] if args.order else None


def _rng(args: argparse.Namespace) -> random.Random:
    return random.Random(args.seed if args.seed is not None else configured_seed())


def _eps(document: dict[str, Any], algebra: Any) -> Functional:
    raw = document.get(KEY_EPS)
    if raw is None:
        msg = "the document has no functional"
        raise SchemaError(f"/{KEY_EPS}", msg)
    row = documents.parse_matrix(algebra.field, [raw], f"/{KEY_EPS}")[0]
    return Functional(algebra.field, row)


def _with_claim(cert: UnrestrictionCertificate) -> UnrestrictionCertificate:
    """Record a border rank claim when the centroid test decides it."""
    limit = cert.limit
    if (
        len(set(limit.dims)) != 1
        or limit.order < 3  # noqa: PLR2004
        or not all(concise_coordinates(limit))
    ):
        return cert
    verdict = minimal_border_rank_verdict(limit)
    if verdict.minimal is None:
        return cert
    return cert.with_claim(CLAIM_MINIMAL if verdict.minimal else CLAIM_NOT_MINIMAL)


def _certificate_report(cert: UnrestrictionCertificate) -> dict[str, Any]:
    report = documents.serialize_certificate(cert)
    if cert.limit.order == 3 and cert.limit.is_segre:  # noqa: PLR2004
        report["limit_pencil"] = render_pencil(cert.limit)
    return report


# unres


def _unres_segre(args: argparse.Namespace) -> int:
    degeneration = documents.parse_degeneration(_load(args.input))
    cert = unrestrict_full(degeneration, _order(args), MinorChoice(args.choice))
    _emit(args, _certificate_report(_with_claim(cert)))
    return EXIT_OK


def _unres_veronese(args: argparse.Namespace) -> int:
    document = _load(args.input)
    if KEY_TERMS in document:
        family = documents.parse_family(document)
        result = unrestrict_family(family)
        ring = result.family.ring
        _emit(
            args,
            {
                "kind": "family",
                "members": [
                    documents.serialize_form(ring, form)
                    for form in result.family.members
                ],
                "limits": [
                    documents.serialize_form(family.field, form)
                    for form in result.family.limit_forms()
                ],
                "map": documents.serialize_matrix(ring, result.map_t),
                "N": result.exp_denominator,
                "steps": [
                    {
                        "variable": step.variable + 1,
                        "iterations": step.iterations,
                        "e_values": [str(e) for e in step.e_values],
                        "weight": str(step.weight),
                        "N": step.exp_denominator,
                    }
                    for step in result.steps
                ],
            },
        )
        return EXIT_OK
    if args.format:
        document = {**document, KEY_FORMAT: args.format}
    cert = unrestrict_partial(documents.parse_degeneration(document), _order(args))
    _emit(args, _certificate_report(cert))
    return EXIT_OK


def _unres_partial(args: argparse.Namespace) -> int:
    document = _load(args.input)
    if args.format:
        document = {**document, KEY_FORMAT: args.format}
    cert = unrestrict_partial(documents.parse_degeneration(document), _order(args))
    _emit(args, _certificate_report(cert))
    return EXIT_OK


# analyze


def _analyze(args: argparse.Namespace) -> int:
    tensor = documents.parse_tensor(_load(args.input))
    report = analyze(tensor, _rng(args))
    if tensor.order == 3 and tensor.is_segre:  # noqa: PLR2004
        report["pencil"] = render_pencil(tensor)
    _emit(args, report)
    return EXIT_OK


# algebra


def _algebra_mult(args: argparse.Namespace) -> int:
    algebra = documents.parse_algebra(_load(args.input))
    _emit(args, documents.serialize_tensor(multiplication_tensor(algebra, args.d)))
    return EXIT_OK


def _algebra_eval(args: argparse.Namespace) -> int:
    document = _load(args.input)
    algebra = documents.parse_algebra(document)
    tensor = evaluation_tensor(algebra, _eps(document, algebra), args.d)
    _emit(args, documents.serialize_tensor(tensor))
    return EXIT_OK


def _algebra_gorenstein(args: argparse.Namespace) -> int:
    algebra = documents.parse_algebra(_load(args.input))
    generator = is_gorenstein(algebra, _rng(args))
    report: dict[str, Any] = {"dim": algebra.dim, "gorenstein": generator is not None}
    if generator is not None:
        report["dual_generator"] = [
            algebra.field.format(x) for x in generator.coefficients
        ]
    _emit(args, report)
    return EXIT_OK


def _algebra_quotient(args: argparse.Namespace) -> int:
    document = _load(args.input)
    algebra = documents.parse_algebra(document)
    quotient = gorenstein_quotient(algebra, _eps(document, algebra))
    field_ = algebra.field
    _emit(
        args,
        {
            KEY_ALGEBRA: documents.serialize_algebra(quotient.algebra),
            KEY_EPS: [field_.format(x) for x in quotient.eps.coefficients],
            "projection": documents.serialize_matrix(field_, quotient.projection),
            "evaluation_tensor": documents.serialize_tensor(
                evaluation_tensor(quotient.algebra, quotient.eps, args.d)
            ),
        },
    )
    return EXIT_OK


# cactus


def _cactus_certificate(path: str) -> CactusCertificate:
    cert = documents.certificate_from_document(_load(path))
    if not isinstance(cert, CactusCertificate):
        msg = "expected a cactus certificate"
        raise SchemaError("/kind", msg)
    return cert


def _cactus_build(args: argparse.Namespace) -> int:
    cert = _cactus_certificate(args.certificate)
    report = documents.serialize_tensor(build_cactus_tensor(cert))
    report["cactus_rank_bound"] = cert.rank_bound
    _emit(args, report)
    return EXIT_OK


def _cactus_verify(args: argparse.Namespace) -> int:
    cert = _cactus_certificate(args.certificate)
    tensor = documents.parse_tensor(_load(args.input))
    verified = verify_cactus_certificate(tensor, cert)
    bound = cert.rank_bound if verified else None
    _emit(args, {"verified": verified, "cactus_rank_bound": bound})
    return EXIT_OK if verified else EXIT_FAILED


# sigma2


def _sigma2_fixed_points(args: argparse.Namespace) -> int:
    points = enumerate_fixed_points(args.d)
    _emit(
        args,
        {
            "d": args.d,
            "count": len(points),
            "expected": expected_fixed_point_count(args.d),
            "points": [
                fp.as_dict()
                | {"tangent_weights": [list(w) for w in tangent_weights(fp, args.d)]}
                for fp in points
            ],
        },
    )
    return EXIT_OK


def _sigma2_motive(args: argparse.Namespace) -> int:
    csigma2 = bb_motive(args.d) if args.via == "bb" else csigma2_motive_formula(args.d)
    sigma2 = sigma2_motive_formula(args.d)
    _emit(
        args,
        {
            "d": args.d,
            "via": args.via,
            "csigma2": {
                "coefficients": list(csigma2.coefficients),
                "betti": csigma2.betti_numbers(),
                "text": str(csigma2),
            },
            "sigma2": {"coefficients": list(sigma2.coefficients), "text": str(sigma2)},
        },
    )
    return EXIT_OK


def _sigma2_count(args: argparse.Namespace) -> int:
    threads = args.threads if args.threads is not None else configured_threads()
    _emit(args, census(args.d, args.p, threads=threads, allow_large=args.large))
    return EXIT_OK


def _sigma2_classify(args: argparse.Namespace) -> int:
    tensor = documents.parse_tensor(_load(args.input))
    form = classify_rank2(tensor)
    if form is None:
        _emit(args, {"border_rank_at_most_two": False})
        return EXIT_OK
    report: dict[str, Any] = {
        "border_rank_at_most_two": True,
        "kind": form.kind,
        "concise": sorted(k + 1 for k in form.concise),
    }
    if form.discriminant is not None:
        ring = tensor.ring
        report["discriminant"] = ring.format(ring.convert(form.discriminant))
        report["split"] = form.split
    _emit(args, report)
    return EXIT_OK


# repro


def _repro(args: argparse.Namespace) -> int:
    if args.name == "all":
        reports = run_all(args.seed)
        _emit(
            args,
            {
                "passed": all(r.passed for r in reports),
                "reports": [r.as_dict() for r in reports],
            },
        )
        return EXIT_OK if all(r.passed for r in reports) else EXIT_FAILED
    report = run_reproduction(args.name, args.seed)
    _emit(args, report.as_dict())
    return EXIT_OK if report.passed else EXIT_FAILED


# Parser


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--out", help="write the JSON result to this file instead of stdout"
    )
    parser.add_argument("--debug", action="store_true", help="log at DEBUG level")
    parser.add_argument(
        "--seed", type=int, default=None, help="seed for randomized choices"
    )


def _leaf(
    sub: argparse._SubParsersAction,
    name: str,
    handler: Callable[[argparse.Namespace], int],
    help_text: str,
) -> argparse.ArgumentParser:
    parser = sub.add_parser(name, help=help_text)
    _common(parser)
    parser.set_defaults(handler=handler)
    return parser


def build_parser() -> argparse.ArgumentParser:
    """Return the argument parser for every subcommand."""
    parser = argparse.ArgumentParser(prog="unrestrict", description=__doc__)
    commands = parser.add_subparsers(dest="command", required=True)

    unres = commands.add_parser(
        "unres", help="concise unrestrictions of degenerations"
    ).add_subparsers(
        dest="algorithm", required=True
    )
    segre = _leaf(unres, "segre", _unres_segre, "unrestrict a tensor degeneration")
    segre.add_argument("--input", required=True)
    segre.add_argument(
        "--order", type=_int_list, help="1-based coordinate order, e.g. 3,2,1"
    )
    segre.add_argument(
        "--choice",
        choices=sorted(MINOR_CHOICES),
        default=MinorChoice.LEX_SMALLEST.value,
    )
    for name, handler, help_text in (
        ("veronese", _unres_veronese, "unrestrict a form, a family or a tensor"),
        ("partial", _unres_partial, "unrestrict a partially symmetric tensor"),
    ):
        leaf = _leaf(unres, name, handler, help_text)
        leaf.add_argument("--input", required=True)
        leaf.add_argument(
            "--format", type=_int_list, help="symmetric block sizes, e.g. 2,1,1"
        )
        leaf.add_argument("--order", type=_int_list, help="1-based coordinate order")

    analyze_parser = _leaf(
        commands, "analyze", _analyze, "conciseness, centroid and 1-genericity report"
    )
    analyze_parser.add_argument("--input", required=True)

    algebra = commands.add_parser("algebra", help="finite algebras").add_subparsers(
        dest="operation", required=True
    )
    for name, handler, help_text in (
        ("mult", _algebra_mult, "multiplication tensor"),
        ("eval", _algebra_eval, "evaluation tensor of the document's functional"),
        ("gorenstein", _algebra_gorenstein, "Gorenstein test with a dual generator"),
        ("quotient", _algebra_quotient, "Gorenstein quotient by the functional"),
    ):
        leaf = _leaf(algebra, name, handler, help_text)
        leaf.add_argument("--input", required=True)
        leaf.add_argument("-d", type=int, default=3, help="tensor order")

    cactus = commands.add_parser("cactus", help="cactus certificates").add_subparsers(
        dest="operation", required=True
    )
    build = _leaf(cactus, "build", _cactus_build, "tensor witnessed by a certificate")
    build.add_argument("--certificate", required=True)
    verify = _leaf(
        cactus, "verify", _cactus_verify, "check a certificate against a tensor"
    )
    verify.add_argument("--certificate", required=True)
    verify.add_argument("--input", required=True)

    sigma2 = commands.add_parser(
        "sigma2", help="the border rank two secant of (P^1)^d"
    ).add_subparsers(
        dest="operation", required=True
    )
    fixed = _leaf(
        sigma2,
        "fixed-points",
        _sigma2_fixed_points,
        "torus-fixed points and tangent weights",
    )
    fixed.add_argument("-d", type=int, required=True)
    motive = _leaf(
        sigma2, "motive", _sigma2_motive, "motives of the secant and the concise secant"
    )
    motive.add_argument("-d", type=int, required=True)
    motive.add_argument("--via", choices=["bb", "formula"], default="bb")
    count = _leaf(sigma2, "count", _sigma2_count, "brute-force point count over F_p")
    count.add_argument("-d", type=int, required=True)
    count.add_argument("-p", type=int, required=True)
    count.add_argument("--threads", type=int, default=None)
    count.add_argument(
        "--large", action="store_true", help="allow scans above the default size limit"
    )
    classify = _leaf(
        sigma2, "classify", _sigma2_classify, "normal form of a border rank two tensor"
    )
    classify.add_argument("--input", required=True)

    repro = _leaf(commands, "repro", _repro, "re-derive a worked example")
    repro.add_argument("name", choices=[*REGISTRY, "all"])
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    """Run the command line and return the exit status."""
    args = build_parser().parse_args(argv)
    setup_logging(debug=args.debug)
    try:
        return args.handler(args)
    except (UnrestrictError, OSError) as err:
        _LOGGER.debug("Command failed", exc_info=True)
        sys.stderr.write(f"error: {err}\n")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
