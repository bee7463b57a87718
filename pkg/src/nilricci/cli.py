"""Command-line front end.

Exit codes: 0 positive certificate or passing suite, 1 not_positive or failing,
2 usage error, 3 inconclusive.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence

from . import chartop, nilalg, oracle, quotient
from .nilalg import NilpotentAlgebra
from .totalspace import SubmersionParams, find_k0

log = logging.getLogger("nilricci")

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INCONCLUSIVE = 0, 1, 2, 3
VERDICT_EXIT = {"positive": EXIT_OK, "not_positive": EXIT_FAIL, "inconclusive": EXIT_INCONCLUSIVE}


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    algebra: Optional[str] = None
    k: Optional[int] = None
    m: int = 1
    mode: str = "sturm"
    r_max: float = 50.0
    steps: int = 500
    out: Optional[str] = None
    fmt: str = "json"


# ---------------------------------------------------------------- output

def _fmt_float(x):
    return format(x, ".17g") if isinstance(x, float) else x


def _normalize(obj):
    if isinstance(obj, dict):
        return {str(k): _normalize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_normalize(v) for v in obj]
    return obj


def render(results, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(_normalize(results), sort_keys=True, indent=2) + "\n"
    if fmt == "csv":
        header, rows = results
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt_float(row[h]) for h in header])
        return buf.getvalue()
    if fmt == "text":
        if isinstance(results, str):
            return results if results.endswith("\n") else results + "\n"
        return "".join(f"{k}: {results[k]}\n" for k in sorted(results))
    raise ValueError(f"unknown format {fmt!r}")


def emit_report(results, fmt: str, path: Optional[str] = None) -> str:
    """Write deterministic bytes to ``path`` (stdout when None); returns the text."""
    text = render(results, fmt)
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)
    return text


# ---------------------------------------------------------------- commands

def resolve_algebra(source: str) -> NilpotentAlgebra:
    if os.path.exists(source):
        a = nilalg.load_algebra(source)
    else:
        try:
            a = nilalg.catalog_algebra(source)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    rep = nilalg.validate(a)
    if not rep.passed:
        raise UsageError(f"invalid algebra {a.name}: {rep.to_dict()['violations'][0]}")
    return a


def _need(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError("missing required option(s): " + ", ".join("--" + n.replace("_", "-") for n in missing))


def cmd_catalog(args) -> int:
    rows = []
    for name in nilalg.CATALOG:
        a = nilalg.catalog_algebra(name)
        b = nilalg.algebra_bound_c(a)
        rows.append({"name": name, "dim": a.dim, "commutation_condition": nilalg.check_commutation_condition(a),
                     "c": str(b.c), "c_diag": str(b.c_diag)})
    if args.format == "text":
        emit_report("".join(f"{r['name']}\tdim={r['dim']}\tc={r['c']}\n" for r in rows), "text", args.out)
    else:
        emit_report(rows, "json", args.out)
    return EXIT_OK


def cmd_validate(args) -> int:
    try:
        a = nilalg.load_algebra(args.file)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {args.file}: {exc}") from None
    except (ValueError, KeyError, TypeError) as exc:
        emit_report({"file": args.file, "passed": False, "violations": [{"check": "format", "witness": str(exc)}]},
                    "json", args.out)
        return EXIT_FAIL
    rep = nilalg.validate(a)
    out = {"file": args.file, "name": a.name, "dim": a.dim, **rep.to_dict()}
    if rep.passed:
        out["commutation_condition"] = nilalg.check_commutation_condition(a)
        try:
            out["bound"] = nilalg.algebra_bound_c(a).to_dict()
        except nilalg.UncertifiedBound as exc:
            out["bound"] = {"error": str(exc)}
    emit_report(out, "json", args.out)
    return EXIT_OK if rep.passed else EXIT_FAIL


def _params(args) -> SubmersionParams:
    _need(args, "algebra", "k")
    if args.k < 1:
        raise UsageError("--k must be >= 1")
    if args.m == 0:
        raise UsageError("--m must be nonzero")
    return SubmersionParams(resolve_algebra(args.algebra), args.k, args.m)


def cmd_certify(args) -> int:
    p = _params(args)
    cert = quotient.certify_positivity(p, args.mode, args.ricci_mode)
    out = cert.to_dict()
    if cert.witness_entry is not None:
        log.info("witness entry %s", cert.witness_entry)
    emit_report(out, "json", args.out)
    return VERDICT_EXIT[cert.verdict]


def cmd_mink(args) -> int:
    _need(args, "algebra")
    if args.m == 0:
        raise UsageError("--m must be nonzero")
    a = resolve_algebra(args.algebra)
    try:
        k, cert = quotient.min_k(a, args.m, args.mode, args.ricci_mode)
    except RuntimeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    k0 = find_k0(a)
    out = {"algebra": a.name, "m": args.m, "mode": args.mode, "min_k": k, "k0": k0,
           "threshold": quotient.threshold_k(k0, a.dim), "certificate": cert.to_dict()}
    emit_report(out, "json", args.out)
    return EXIT_OK


def cmd_scan(args) -> int:
    p = _params(args)
    if args.steps < 2:
        raise UsageError("--steps must be >= 2")
    if args.r_max <= 0:
        raise UsageError("--r-max must be positive")
    rows = quotient.scan(p, args.r_max, args.steps, args.ricci_mode)
    emit_report((quotient.scan_header(p.n), rows), "csv", args.out)
    return EXIT_OK


def cmd_oracle(args) -> int:
    if args.suite is None:
        raise UsageError("oracle needs --suite [identity|fd|all]")
    out = {}
    ok = True
    if args.suite in ("identity", "all"):
        reports = [oracle.identity_suite(n, m, oracle.DEFAULT_RADII).to_dict() for n in (1, 2, 3) for m in (1, 2, 3)]
        out["identity"] = reports
        ok &= all(r["passed"] for r in reports)
    if args.suite in ("fd", "all"):
        res = oracle.oracle_suite()
        out["fd"] = res
        ok &= res["passed"]
    out["passed"] = ok
    emit_report(out, "json", args.out)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_topology(args) -> int:
    if args.demo == "gysin":
        res = chartop.gysin_demo()
        if args.format == "json":
            emit_report(res, "json", args.out)
        else:
            emit_report(f"euler class e = {res['euler_class']}\n|det| = {res['abs_det']}\n"
                        f"e^2 = {res['e_squared']}\n", "text", args.out)
        ok = res["isomorphism"] and res["e_squared_coefficient"] == 2 and res["e_in_image_of_H0"]
        return EXIT_OK if ok else EXIT_FAIL
    try:
        alpha = chartop.parse_class(args.cls) if args.cls else None
        res = chartop.pontryagin_demo(alpha, args.k or 5, args.m)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.format == "json":
        emit_report(res, "json", args.out)
    else:
        emit_report(f"c1 = {res['c1']}\np = {res['total_p']}\np1 = {res['p1']}\n", "text", args.out)
    return EXIT_OK


# ---------------------------------------------------------------- parser

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="nilricci", description="Positive Ricci curvature certificates for (G x C^k)/Phi_m(R).")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def add(name, help_, *, params=False, mode=False):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--out", help="output file (default stdout)")
        if params:
            sp.add_argument("--algebra", help="catalog name or algebra JSON file")
            sp.add_argument("--k", type=int)
            sp.add_argument("--m", type=int, default=1)
            sp.add_argument("--ricci-mode", choices=("bound", "exact"), default="bound")
        if mode:
            sp.add_argument("--mode", choices=quotient.METHODS, default="sturm")
        return sp

    sp = add("catalog", "list catalog algebras")
    sp.add_argument("--format", choices=("json", "text"), default="json")
    sp = add("validate", "validate an algebra JSON file")
    sp.add_argument("file")
    add("mink", "smallest certified k", params=True, mode=True)
    add("certify", "certify positivity for one k", params=True, mode=True)
    sp = add("scan", "tabulate base Ricci entries as CSV", params=True)
    sp.add_argument("--r-max", type=float, default=50.0)
    sp.add_argument("--steps", type=int, default=500)
    sp = add("oracle", "run numerical verification suites")
    sp.add_argument("--suite", nargs="?", const="all", choices=("identity", "fd", "all"))
    sp = add("topology", "torus cohomology demos")
    sp.add_argument("--demo", choices=("gysin", "pontryagin"), required=True)
    sp.add_argument("--class", dest="cls", help='degree-2 class, e.g. "x1^x2 + x3^x4"')
    sp.add_argument("--k", type=int)
    sp.add_argument("--m", type=int, default=2)
    sp.add_argument("--format", choices=("json", "text"), default="text")
    return parser


COMMANDS = {"catalog": cmd_catalog, "validate": cmd_validate, "mink": cmd_mink, "certify": cmd_certify,
            "scan": cmd_scan, "oracle": cmd_oracle, "topology": cmd_topology}


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a subcommand is required")
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


def main() -> None:
    sys.exit(run())
