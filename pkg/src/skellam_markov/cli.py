"""Command-line front end.

Subcommands: pmf, exact, build, approx, compare, sweep, ratefit, check.
Run ``skellam-markov <subcommand> --help`` for flags.

Exit codes: 0 success; 1 failed checks or sweep rows with errors; 2 usage
errors; 3 parameter constraint violations; 4 numerical errors raised by the
library.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from . import bounds, chain, checks, components
from .exceptions import (
    BesselRangeError,
    DivergentSeriesError,
    InvalidMeasureError,
    NonzeroMassError,
    ParameterError,
    UnsupportedBoundError,
)
from .measure import NormKind, TruncationBudget

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_PARAMS, EXIT_NUMERIC = 0, 1, 2, 3, 4
LIBRARY_ERRORS = (BesselRangeError, DivergentSeriesError, InvalidMeasureError, NonzeroMassError,
                  UnsupportedBoundError)


class CommandError(Exception):
    def __init__(self, message: str, code: int = EXIT_USAGE):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CommandError(f"{self.prog}: {message}", EXIT_USAGE)


@dataclass
class Command:
    name: str
    args: argparse.Namespace


def _number(text: str) -> float:
    """Float or fraction such as ``1/30``."""
    try:
        return float(Fraction(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from exc


def _numbers(text: str) -> list[float]:
    return [_number(x) for x in text.split(",") if x.strip()]


def _ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a list of integers: {text!r}") from exc


def _norm_kind(text: str) -> NormKind:
    try:
        return NormKind.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _norm_kinds(text: str) -> list[NormKind]:
    return [_norm_kind(x) for x in text.split(",") if x.strip()]


def _add_chain(p: argparse.ArgumentParser, multi: bool = False) -> None:
    conv = _numbers if multi else _number
    p.add_argument("--alpha", type=conv, required=not multi)
    p.add_argument("--beta", type=conv, required=not multi)
    p.add_argument("--p1", type=_number, default=1 / 3)
    p.add_argument("--p2", type=_number, default=1 / 3)
    p.add_argument("--p3", type=_number, default=1 / 3)
    p.add_argument("--exploratory", action="store_true",
                   help="allow alpha, beta up to 1/2 (with a warning)")


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tol", type=_number, default=1e-12, help="truncation budget per operation")
    p.add_argument("--out", type=Path, help="write results here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="skellam-markov", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("pmf", help="Skellam probability at one point")
    p.add_argument("--l1", type=_number, required=True)
    p.add_argument("--l2", type=_number, required=True)
    p.add_argument("--k", type=int, required=True)
    _add_common(p)

    p = sub.add_parser("exact", help="exact law of S_n as JSON")
    _add_chain(p)
    p.add_argument("--n", type=int, required=True)
    _add_common(p)

    p = sub.add_parser("build", help="named component as JSON")
    _add_chain(p)
    p.add_argument("--name", required=True, choices=[c.value for c in components.ComponentName])
    p.add_argument("--k-variant", choices=["display", "proof"], default="display")
    p.add_argument("--p-variant", choices=["display", "stationary"], default="display")
    _add_common(p)

    p = sub.add_parser("approx", help="approximant of F_n as JSON")
    _add_chain(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--approx", choices=["skellam", "ekg", "expansion"], default="skellam")
    _add_common(p)

    p = sub.add_parser("compare", help="one distance and bound row")
    _add_chain(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--approx", choices=[t.value for t in bounds.TheoremId], default="skellam")
    p.add_argument("--metric", type=_norm_kind, default=NormKind("tv"))
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    _add_common(p)

    p = sub.add_parser("sweep", help="distances and bound ratios over a grid")
    _add_chain(p, multi=True)
    p.add_argument("--n", type=_ints, help="comma-separated list of n")
    p.add_argument("--grid", type=Path, help="CSV/JSON file with alpha,beta,n[,p1,p2,p3]")
    p.add_argument("--approx", choices=[t.value for t in bounds.TheoremId], default="skellam")
    p.add_argument("--metric", type=_norm_kinds, default=[NormKind("tv")])
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--jobs", type=int, default=1)
    _add_common(p)

    p = sub.add_parser("ratefit", help="log-log slope of lhs against n from a sweep CSV")
    p.add_argument("--input", type=Path, help="sweep CSV (default: stdin)")
    p.add_argument("--metric", type=str)
    p.add_argument("--column", choices=["lhs", "ratio"], default="lhs")
    p.add_argument("--out", type=Path)

    p = sub.add_parser("check", help="run a check suite")
    p.add_argument("--suite", choices=list(checks.SUITES) + ["all"], required=True)
    p.add_argument("--cases", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path)
    return parser


def _chain(args, alpha=None, beta=None, n=None) -> components.ChainParams:
    a = args.alpha if alpha is None else alpha
    b = args.beta if beta is None else beta
    try:
        return components.ChainParams(a, b, args.p1, args.p2, args.p3, strict=not args.exploratory)
    except ParameterError as exc:
        raise CommandError(
            f"--alpha/--beta/--p1..--p3: condition 0 ≤ α ≤ 1/30, 0 < β ≤ 1/30 "
            f"(probabilities summing to 1) violated: {exc}", EXIT_PARAMS
        ) from exc


def _read_grid(path: Path, args) -> list[tuple[components.ChainParams, int]]:
    text = path.read_text()
    if path.suffix.lower() == ".json":
        records = json.loads(text)
    else:
        records = list(csv.DictReader(io.StringIO(text)))
    grid = []
    for rec in records:
        ns = argparse.Namespace(p1=float(rec.get("p1", args.p1)), p2=float(rec.get("p2", args.p2)),
                                p3=float(rec.get("p3", args.p3)), exploratory=args.exploratory,
                                alpha=None, beta=None)
        grid.append((_chain(ns, float(rec["alpha"]), float(rec["beta"])), int(rec["n"])))
    return grid


def parse_command(argv: list[str]) -> Command:
    """Parse and validate ``argv``; raises :class:`CommandError` on bad input."""
    args = build_parser().parse_args(argv)
    name = args.command
    if getattr(args, "tol", 1.0) < 0:
        raise CommandError("--tol must be >= 0")
    if name in ("exact", "build", "approx", "compare"):
        args.chain = _chain(args)
    if name in ("exact", "approx", "compare") and args.n < (0 if name == "exact" else 1):
        raise CommandError("--n must be positive")
    if name == "pmf":
        try:
            args.params = components.SkellamParams(args.l1, args.l2)
        except ParameterError as exc:
            raise CommandError(f"--l1/--l2: {exc}", EXIT_PARAMS) from exc
    if name == "sweep":
        if args.grid is not None:
            args.points = _read_grid(args.grid, args)
        else:
            if args.alpha is None or args.beta is None or args.n is None:
                raise CommandError("sweep needs --grid or all of --alpha, --beta, --n")
            if min(args.n) < 1:
                raise CommandError("--n values must be positive")
            args.points = [(_chain(args, a, b), n)
                           for a, b, n in itertools.product(args.alpha, args.beta, args.n)]
        if not args.points:
            raise CommandError("empty sweep grid")
    if name == "check" and args.cases is not None and args.cases < 1:
        raise CommandError("--cases must be positive")
    return Command(name, args)


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        out.write_text(text if text.endswith("\n") else text + "\n")


def run_command(cmd: Command) -> int:
    """Execute a parsed command; returns the process exit status."""
    a = cmd.args
    name = cmd.name
    if name == "pmf":
        _emit(f"{components.skellam_pmf(a.params, a.k):.12g}", a.out)
        return EXIT_OK
    if name == "exact":
        _emit(chain.exact_distribution(a.chain, a.n).to_json(), a.out)
        return EXIT_OK
    if name == "build":
        M = components.build_component(a.chain, a.name, TruncationBudget(a.tol),
                                       k_variant=a.k_variant, p_variant=a.p_variant)
        _emit(M.to_json(), a.out)
        return EXIT_OK
    if name == "approx":
        _emit(bounds.approximant(a.approx, a.chain, a.n, TruncationBudget(a.tol)).to_json(), a.out)
        return EXIT_OK
    if name in ("compare", "sweep"):
        if name == "compare":
            rows = bounds.sweep([(a.chain, a.n)], a.approx, [a.metric], jobs=1, budget=a.tol)
        else:
            rows = bounds.sweep(a.points, a.approx, a.metric, jobs=a.jobs, budget=a.tol)
        text = bounds.rows_to_csv(rows) if a.format == "csv" else bounds.rows_to_json(rows)
        _emit(text, a.out)
        bad = [r for r in rows if r.error]
        for r in bad:
            print(f"error row alpha={r.alpha} beta={r.beta} n={r.n} metric={r.metric}: {r.error}",
                  file=sys.stderr)
        if bad:
            print(f"warning: {len(bad)} of {len(rows)} rows failed", file=sys.stderr)
            return EXIT_FAILED
        return EXIT_OK
    if name == "ratefit":
        text = a.input.read_text() if a.input else sys.stdin.read()
        rows = [r for r in bounds.rows_from_csv(text) if a.metric is None or r.metric == a.metric]
        groups: dict[tuple, list] = {}
        for r in rows:
            groups.setdefault((r.approximant, r.metric, r.alpha, r.beta, r.p1, r.p2, r.p3), []).append(r)
        if not groups:
            raise CommandError("no sweep rows to fit")
        lines = ["approximant,metric,alpha,beta,p1,p2,p3,points,slope,intercept"]
        for key, rs in groups.items():
            slope, intercept = bounds.rate_fit([(r.n, getattr(r, a.column)) for r in rs])
            lines.append(",".join(map(str, key)) + f",{len(rs)},{slope!r},{intercept!r}")
        _emit("\n".join(lines), a.out)
        return EXIT_OK
    if name == "check":
        suites = checks.SUITES if a.suite == "all" else (a.suite,)
        lines, failed = [], 0
        for s in suites:
            results, report = checks.run_suite(s, a.cases, a.seed)
            for res in results:
                lines.append(res.line())
                failed += not res.passed
            for row in report:
                lines.append("REPORT " + json.dumps(row))
        _emit("\n".join(lines), a.out)
        return EXIT_FAILED if failed else EXIT_OK
    raise CommandError(f"unknown command {name!r}")


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        return run_command(parse_command(argv))
    except CommandError as exc:
        print(str(exc), file=sys.stderr)
        return exc.code
    except ParameterError as exc:
        print(f"parameter error: {exc}", file=sys.stderr)
        return EXIT_PARAMS
    except LIBRARY_ERRORS as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
