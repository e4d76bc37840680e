"""Command line front end.

Exit status: 0 when the check passes or the construction succeeds, 1 for a
domain-level negative (not Delzant, not equivalent, not almost
isotropy-maximal, invalid invariants, failed verification), 2 for unreadable
or malformed input. Every run writes one JSON document.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import serialization as ser
from .fixtures import emit_fixture, fixture_names
from .invariants import (
    InvalidTuple,
    MaximalityClass,
    SliceBoundViolated,
    classify_orbit_datum,
    classify_tuple,
    manifold_dimension,
    tuples_equivalent,
    validate_tuple,
)
from .models import ModelError, build_isotropy_maximal_model, decompose_almost, extend_to_isotropy_maximal
from .moser import (
    DEFAULT_GRID_T,
    DEFAULT_GRID_X,
    DEFAULT_SAMPLES,
    DEFAULT_STEPS,
    DEFAULT_TOL,
    DegenerateInput,
    PencilDegenerate,
    integrate_moser_flow,
)
from .polytope import PolytopeError, centroid, is_delzant

OK, NEGATIVE, MALFORMED = 0, 1, 2


class InputError(Exception):
    pass


def _read(path: str):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror or exc}") from None
    try:
        return ser.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None


def _decode(path: str, decoder):
    data = _read(path)
    try:
        return decoder(data)
    except ser.SchemaError as exc:
        raise InputError(f"{path}: {exc}") from None


def _point(x) -> list[str]:
    return [ser.q(v) for v in x]


# ---------------------------------------------------------------------------
# subcommands


def cmd_validate_delzant(args) -> tuple[int, dict]:
    P = _decode(args.input, ser.polytope_from_json)
    try:
        report = is_delzant(P)
    except PolytopeError as exc:
        return NEGATIVE, {"delzant": False, "error": f"{type(exc).__name__}: {exc}"}
    out = {
        "delzant": report.is_delzant,
        "simple": report.simple,
        "smooth": report.smooth,
        "failing_vertices": [{"vertex": _point(v.coordinates), "reason": why} for v, why in report.failing_vertices],
        "centroid": _point(centroid(P)),
        "polytope": ser.polytope_to_json(P),
    }
    return (OK if report.is_delzant else NEGATIVE), out


def _almost(cls: MaximalityClass) -> int:
    return NEGATIVE if cls is MaximalityClass.NOT_ALMOST else OK


def cmd_classify(args) -> tuple[int, dict]:
    data = _read(args.input)
    if isinstance(data, dict) and "dim_M" in data:
        try:
            datum = ser.orbit_from_json(data)
        except SliceBoundViolated as exc:
            return NEGATIVE, {"kind": "orbit", "error": f"SliceBoundViolated: {exc}"}
        except ser.SchemaError as exc:
            raise InputError(f"{args.input}: {exc}") from None
        except ValueError as exc:
            raise InputError(f"{args.input}: {exc}") from None
        cls = classify_orbit_datum(datum)
        return _almost(cls), {"kind": "orbit", "class": cls.value}
    try:
        t = ser.tuple_from_json(data)
    except ser.SchemaError as exc:
        raise InputError(f"{args.input}: {exc}") from None
    report = validate_tuple(t)
    if not report.ok:
        return NEGATIVE, {"kind": "tuple", "valid": False, "diagnostics": list(report.diagnostics)}
    cls = classify_tuple(t)
    return _almost(cls), {
        "kind": "tuple",
        "valid": True,
        "class": cls.value,
        "manifold_dimension": manifold_dimension(t),
    }


def cmd_equivalent(args) -> tuple[int, dict]:
    a = _decode(args.first, ser.tuple_from_json)
    b = _decode(args.second, ser.tuple_from_json)
    try:
        same = tuples_equivalent(a, b)
    except InvalidTuple as exc:
        return NEGATIVE, {"equivalent": False, "error": "invalid tuple", "diagnostics": list(exc.diagnostics)}
    except ValueError as exc:
        return NEGATIVE, {"equivalent": False, "error": str(exc)}
    return (OK if same else NEGATIVE), {"equivalent": same}


def cmd_build_model(args) -> tuple[int, dict]:
    data = _read(args.input)
    try:
        data = ser._obj(data, "", ("sigma", "delta"))
        sigma = ser.form_from_json(data["sigma"])
        delta = ser.polytope_from_json(data["delta"])
    except ser.SchemaError as exc:
        raise InputError(f"{args.input}: {exc}") from None
    try:
        model = build_isotropy_maximal_model(sigma, delta)
    except (ModelError, PolytopeError) as exc:
        return NEGATIVE, {"error": str(exc)}
    return OK, ser.model_to_json(model)


def cmd_decompose(args) -> tuple[int, dict]:
    t = _decode(args.input, ser.tuple_from_json)
    try:
        model = decompose_almost(t)
    except InvalidTuple as exc:
        return NEGATIVE, {"error": "invalid tuple", "diagnostics": list(exc.diagnostics)}
    except (ModelError, PolytopeError) as exc:
        return NEGATIVE, {"error": str(exc)}
    return OK, ser.model_to_json(model)


def cmd_extend(args) -> tuple[int, dict]:
    t = _decode(args.input, ser.tuple_from_json)
    try:
        ext = extend_to_isotropy_maximal(t)
    except InvalidTuple as exc:
        return NEGATIVE, {"error": "invalid tuple", "diagnostics": list(exc.diagnostics)}
    except ModelError as exc:
        return NEGATIVE, {"error": str(exc)}
    out = ser.tuple_to_json(ext)
    out["class"] = classify_tuple(ext).value
    out["manifold_dimension"] = manifold_dimension(ext)
    return OK, out


def cmd_moser_verify(args) -> tuple[int, dict]:
    w = _decode(args.input, ser.moser_form_from_json)
    try:
        report = integrate_moser_flow(
            w, steps=args.steps, samples=args.samples, grid_t=args.grid_t, grid_x=args.grid_x, tol=args.tol
        )
    except (DegenerateInput, PencilDegenerate) as exc:
        return NEGATIVE, {"passed": False, "error": f"{type(exc).__name__}: {exc}"}
    return (OK if report.passed else NEGATIVE), ser.moser_report_to_json(report)


def cmd_fixture(args) -> tuple[int, dict]:
    if args.list:
        return OK, {"fixtures": fixture_names()}
    if not args.name:
        raise InputError("fixture name required (or --list)")
    try:
        return OK, emit_fixture(args.name)
    except KeyError as exc:
        raise InputError(exc.args[0]) from None


# ---------------------------------------------------------------------------


def _positive_int(text: str) -> int:
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="isomax", description=__doc__.splitlines()[0])
    parser.add_argument("-o", "--output", help="write the JSON report here instead of stdout")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate-delzant", help="check simplicity and smoothness of a polytope")
    p.add_argument("input")
    p.set_defaults(func=cmd_validate_delzant)

    p = sub.add_parser("classify", help="maximality class of an orbit datum or invariant tuple")
    p.add_argument("input")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("equivalent", help="compare the invariants of two tuples")
    p.add_argument("first")
    p.add_argument("second")
    p.set_defaults(func=cmd_equivalent)

    p = sub.add_parser("build-model", help="product model from {sigma, delta}")
    p.add_argument("input")
    p.set_defaults(func=cmd_build_model)

    p = sub.add_parser("decompose", help="product decomposition of an almost isotropy-maximal tuple")
    p.add_argument("input")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("extend", help="extend a strictly almost isotropy-maximal tuple by one circle")
    p.add_argument("input")
    p.set_defaults(func=cmd_extend)

    p = sub.add_parser("moser-verify", help="verify the Moser linearization of an invariant form")
    p.add_argument("input")
    p.add_argument("--steps", type=_positive_int, default=DEFAULT_STEPS)
    p.add_argument("--samples", type=_positive_int, default=DEFAULT_SAMPLES)
    p.add_argument("--grid-t", type=_positive_int, default=DEFAULT_GRID_T)
    p.add_argument("--grid-x", type=_positive_int, default=DEFAULT_GRID_X)
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.set_defaults(func=cmd_moser_verify)

    p = sub.add_parser("fixture", help="print a built-in fixture")
    p.add_argument("name", nargs="?")
    p.add_argument("--list", action="store_true")
    p.set_defaults(func=cmd_fixture)
    return parser


def _emit(report: dict, output: str | None) -> None:
    text = ser.dumps(report) + "\n"
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        if not exc.code:
            return OK
        _emit({"error": "usage error; see isomax --help"}, None)
        return MALFORMED
    try:
        status, report = args.func(args)
    except InputError as exc:
        print(f"isomax: {exc}", file=sys.stderr)
        status, report = MALFORMED, {"error": str(exc)}
    except Exception as exc:  # noqa: BLE001 - exit-code contract covers internal failures
        print(f"isomax: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        status, report = MALFORMED, {"error": f"internal error: {type(exc).__name__}: {exc}"}
    try:
        _emit(report, args.output)
    except OSError as exc:
        print(f"isomax: cannot write {args.output}: {exc}", file=sys.stderr)
        return MALFORMED
    return status


if __name__ == "__main__":
    sys.exit(main())
