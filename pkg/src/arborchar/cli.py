"""Command-line front end: emit presentations, verify with the matrix
oracle, generate witness families, and count closure components.

Exit codes: 0 success, 2 input/validation error, 3 unsupported scope,
4 verification failure.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys

from . import __version__
from .errors import (
    ArborError,
    GenericityError,
    StructureError,
    TangleParseError,
    UnsupportedShapeError,
    WrongEngineError,
)
from .invariants import Presentation, closure_equations
from .links import link_presentation
from .mat2 import Mat2
from .oracle import SUITE_NAMES, run_suite, sample_in_Gt
from .tangle import ClosureExpr, component_count, parse
from .witness import pairwise_gaps, witness_family

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_UNSUPPORTED = 3
EXIT_VERIFY = 4

TOL_ENV = "ARBORCHAR_TOL"


def _default_tol() -> float:
    raw = os.environ.get(TOL_ENV)
    if raw is None:
        return 1e-9
    try:
        return float(raw)
    except ValueError:
        raise SystemExit(f"invalid {TOL_ENV} value: {raw!r}")


def _read_expression(args: argparse.Namespace) -> str:
    if args.file is not None:
        if args.expr is not None:
            _fail(EXIT_INPUT, "give an expression or --file, not both")
        try:
            with open(args.file, encoding="utf-8") as fh:
                return fh.read().strip()
        except OSError as exc:
            _fail(EXIT_INPUT, f"cannot read {args.file}: {exc}")
    if args.expr is None:
        _fail(EXIT_INPUT, "an expression (or --file) is required")
    return args.expr


def _fail(code: int, message: str) -> None:
    print(f"error: {message}", file=sys.stderr)
    raise SystemExit(code)


def _write_output(text: str, out: str | None) -> None:
    if out is None:
        print(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")


def _provenance(expr: str | None = None, seed: int | None = None) -> dict:
    prov: dict = {"tool": "arborchar", "version": __version__}
    if expr is not None:
        prov["expression"] = expr
    if seed is not None:
        prov["seed"] = seed
    return prov


def _parse_closure(text: str) -> ClosureExpr:
    try:
        node = parse(text)
    except TangleParseError as exc:
        _fail(EXIT_INPUT, str(exc))
    if not isinstance(node, ClosureExpr):
        _fail(EXIT_INPUT, "a closure D(...) or N(...) is required")
    return node


def cmd_emit(args: argparse.Namespace) -> int:
    text = _read_expression(args)
    closure = _parse_closure(text)
    try:
        if args.link:
            pres: Presentation = link_presentation(closure)
        else:
            pres = closure_equations(closure)
    except UnsupportedShapeError as exc:
        _fail(EXIT_UNSUPPORTED, str(exc))
    except (WrongEngineError, StructureError, ArborError) as exc:
        _fail(EXIT_INPUT, str(exc))
    if args.format == "json":
        payload = pres.to_json()
        payload["provenance"] = _provenance(expr=text)
        _write_output(json.dumps(payload, indent=2), args.out)
    else:
        _write_output(pres.render_text(), args.out)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    names = SUITE_NAMES if args.suite == "all" else (args.suite,)
    reports = []
    ok = True
    for name in names:
        rep = run_suite(name, samples=args.samples, seed=args.seed, tol=args.tol)
        reports.append(rep)
        ok = ok and rep.passed
        status = "pass" if rep.passed else "FAIL"
        print(
            f"{name}: {status} samples={rep.samples} "
            f"max_residual={rep.max_residual:.3e} rejected={rep.rejected}"
        )
    if args.out is not None:
        payload = {
            "provenance": _provenance(seed=args.seed),
            "reports": [r.to_json() for r in reports],
        }
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2)
    return EXIT_OK if ok else EXIT_VERIFY


def _complex_arg(raw: str) -> complex:
    try:
        return complex(raw.replace(" ", ""))
    except ValueError:
        _fail(EXIT_INPUT, f"not a complex number: {raw!r}")


def _load_pair(path: str) -> tuple[Mat2, Mat2]:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        mats = []
        for key in ("a1", "a2"):
            entries = [complex(re, im) for re, im in data[key]]
            mats.append(Mat2(*entries))
        return mats[0], mats[1]
    except (OSError, ValueError, KeyError, TypeError) as exc:
        _fail(EXIT_INPUT, f"cannot load pair file {path}: {exc}")


def cmd_witness(args: argparse.Namespace) -> int:
    tol = args.tol
    t = _complex_arg(args.t)
    t23 = _complex_arg(args.t23)
    t34 = _complex_arg(args.t34)
    t14 = _complex_arg(args.t14)
    rng = random.Random(args.seed)
    if args.t13 is not None:
        t13_values = [_complex_arg(v) for v in args.t13.split(",")]
    else:
        t13_values = []
        while len(t13_values) < args.t13_count:
            cand = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
            if abs(cand - t23) > 0.2 and abs(cand - (t * t - t23)) > 0.2:
                t13_values.append(cand)
    if args.pair_file is not None:
        a1, a2 = _load_pair(args.pair_file)
    else:
        while True:
            a1 = sample_in_Gt(t, rng)
            a2 = sample_in_Gt(t, rng)
            if (a1 @ a2 - a2 @ a1).norm() > 1e-3:
                break
    try:
        samples = witness_family(a1, a2, t, t23, t34, t14, t13_values)
    except GenericityError as exc:
        _fail(EXIT_INPUT, str(exc))
    except ArborError as exc:
        _fail(EXIT_VERIFY, str(exc))
    ok = True
    for s in samples:
        table = s.trace_table()
        trace_err = max(
            abs(table["t13"] - s.t13),
            abs(table["t23"] - t23),
            abs(table["t34"] - t34),
            abs(table["t14"] - t14),
        )
        if abs(s.gram_det4) > 1e-8 or trace_err > tol:
            ok = False
    gaps = pairwise_gaps(samples)
    payload = {
        "provenance": _provenance(seed=args.seed),
        "t": [t.real, t.imag],
        "samples": [s.to_json() for s in samples],
        "min_pairwise_gap": min(gaps) if gaps else None,
        "passed": ok,
    }
    text = json.dumps(payload, indent=2)
    _write_output(text, args.out)
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_components(args: argparse.Namespace) -> int:
    text = _read_expression(args)
    closure = _parse_closure(text)
    print(component_count(closure))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="arborchar",
        description=(
            "Exact defining equations of excellent character varieties of "
            "arborescent knots, with a numeric matrix oracle"
        ),
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_expr_flags(p: argparse.ArgumentParser) -> None:
        p.add_argument("expr", nargs="?", help="tangle closure expression")
        p.add_argument("--file", help="read the expression from a file")

    p_emit = sub.add_parser("emit", help="emit the defining equations")
    add_expr_flags(p_emit)
    p_emit.add_argument("--format", choices=("json", "text"), default="text")
    p_emit.add_argument("--out", help="write to a file instead of stdout")
    p_emit.add_argument(
        "--link",
        action="store_true",
        help="use the two-trace engine for supported two-component shapes",
    )
    p_emit.set_defaults(func=cmd_emit)

    p_verify = sub.add_parser("verify", help="run oracle suites")
    p_verify.add_argument(
        "--suite", choices=SUITE_NAMES + ("all",), default="all"
    )
    p_verify.add_argument("--samples", type=int, default=None)
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.add_argument("--tol", type=float, default=None)
    p_verify.add_argument("--out", help="write the JSON report to a file")
    p_verify.set_defaults(func=cmd_verify)

    p_wit = sub.add_parser("witness", help="generate a witness family")
    p_wit.add_argument("--t", required=True, help="meridian trace")
    p_wit.add_argument("--t23", required=True)
    p_wit.add_argument("--t34", required=True)
    p_wit.add_argument("--t14", required=True)
    p_wit.add_argument("--t13", help="comma-separated t13 values")
    p_wit.add_argument("--t13-count", type=int, default=5)
    p_wit.add_argument("--pair-file", help="JSON file with entries a1, a2")
    p_wit.add_argument("--seed", type=int, default=0)
    p_wit.add_argument("--tol", type=float, default=None)
    p_wit.add_argument("--out", help="write the JSON report to a file")
    p_wit.set_defaults(func=cmd_witness)

    p_comp = sub.add_parser("components", help="print the component count")
    add_expr_flags(p_comp)
    p_comp.set_defaults(func=cmd_components)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "tol", None) is None and hasattr(args, "tol"):
        args.tol = _default_tol()
    try:
        return args.func(args)
    except SystemExit:
        raise
    except ArborError as exc:
        _fail(EXIT_INPUT, str(exc))


if __name__ == "__main__":
    sys.exit(main())
