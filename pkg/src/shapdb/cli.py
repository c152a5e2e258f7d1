"""``shapdb`` command line: shapq, shapi and classify subcommands.

Reports are JSON documents written with sorted keys, so output is byte-stable
for fixed inputs, flags and seed. Exact rationals are written as
``{"num": "...", "den": "..."}`` strings.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import __version__
from .errors import BudgetExceeded, ShapdbError
from .inconsistency import (
    InconsistencyConfig,
    MeasureKind,
    graph_measure,
    lhs_chain_classify,
    shapi_all,
    tractability_report,
)
from .inconsistency.measures import Budget
from .query import QueryConfig, classification_report, shapq_all
from .relational import conflict_graph, eval_boolean, parse_database, parse_fds, parse_query

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_BUDGET = 2
EXIT_CHECKSUM = 3

SCHEMA_VERSION = 1


def rational(x: Fraction) -> dict:
    x = Fraction(x)
    return {"num": str(x.numerator), "den": str(x.denominator)}


def _value(v):
    return rational(v) if isinstance(v, Fraction) else float(v)


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ShapdbError(f"cannot read {path}: {e.strerror}") from None


def _fraction(text: str) -> Fraction:
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None
    if value <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def _ids(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated fact ids, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="shapdb", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"shapdb {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--db", required=True, help="fact file")
        sp.add_argument("--eps", type=float, default=0.05)
        sp.add_argument("--delta", type=float, default=0.1)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--approx", choices=("additive", "multiplicative"), default="additive")
        sp.add_argument("--facts", type=_ids, default=None, help="comma-separated fact ids")
        sp.add_argument("--perm-cap", type=int, default=9)
        sp.add_argument("--subset-cap", type=int, default=None)
        sp.add_argument("--workers", type=int, default=1)
        sp.add_argument("--out", help="write the JSON report here instead of stdout")
        sp.add_argument("--timing", action="store_true", help="include wall-clock timing")

    q = sub.add_parser("shapq", help="contribution of endogenous facts to a Boolean query")
    common(q)
    q.add_argument("--query", required=True, help="datalog-style query file")
    q.add_argument("--engine", default="auto",
                   choices=("auto", "brute-perm", "brute-subset", "hierarchical", "sample"))
    q.add_argument("--gap", type=_fraction, default=None)

    i = sub.add_parser("shapi", help="contribution of facts to FD inconsistency")
    common(i)
    i.add_argument("--fds", required=True, help="FD file")
    i.add_argument("--measure", required=True, help="drastic | MI | P | R | MC")
    i.add_argument("--engine", default="auto",
                   choices=("auto", "brute-perm", "brute-subset", "closed-form", "sample"))
    i.add_argument("--budget", type=int, default=None, help="search budget (default: $SHAPDB_BUDGET)")

    c = sub.add_parser("classify", help="query classification and complexity verdicts")
    c.add_argument("--query")
    c.add_argument("--fds")
    c.add_argument("--measure", help="restrict the FD verdict to one measure")
    c.add_argument("--out")
    return p


def _fact_entries(db, results):
    return [
        {
            "id": r.fact,
            "fact": str(db.fact(r.fact)),
            "value": _value(r.value),
            "exact": r.exact,
            "engine": r.engine,
            "guarantee": r.guarantee,
        }
        for r in results
    ]


def _checksum(results, expected: Fraction, what: str) -> dict:
    exact = all(r.exact for r in results)
    if exact:
        total = sum((r.value for r in results), Fraction(0))
        return {"what": what, "sum": rational(total), "expected": rational(expected),
                "matches": total == expected, "exact": True}
    total = sum(float(r.value) for r in results)
    return {"what": what, "sum": total, "expected": rational(expected), "matches": None,
            "exact": False}


def run_shapq(args) -> tuple[dict, int]:
    db = parse_database(_read(args.db))
    q = parse_query(_read(args.query), db.schema)
    cfg = QueryConfig(engine=args.engine, approx=args.approx, eps=args.eps, delta=args.delta,
                      seed=args.seed, gap=args.gap, perm_cap=args.perm_cap,
                      subset_cap=args.subset_cap or 20, workers=args.workers)
    results = shapq_all(q, db, cfg)
    exo = db.restrict(f.id for f in db.exogenous)
    expected = Fraction(eval_boolean(q, db) - eval_boolean(q, exo))
    checksum = _checksum(results, expected, "sum of values vs q(D) - q(D_x)")
    selected = results if args.facts is None else [r for r in results if r.fact in set(args.facts)]
    if args.facts is not None:
        missing = set(args.facts) - {r.fact for r in results}
        if missing:
            raise ShapdbError(f"not endogenous fact ids: {sorted(missing)}")
    report = {
        "schema_version": SCHEMA_VERSION,
        "command": "shapq",
        "inputs": {"db": args.db, "query": args.query},
        "config": {"engine": args.engine, "approx": args.approx, "eps": args.eps,
                   "delta": args.delta, "seed": args.seed,
                   "gap": None if args.gap is None else rational(args.gap)},
        "classification": classification_report(q),
        "facts": _fact_entries(db, selected),
        "checksum": checksum,
        "seed": args.seed,
    }
    return report, EXIT_CHECKSUM if checksum["matches"] is False else EXIT_OK


def run_shapi(args) -> tuple[dict, int]:
    db = parse_database(_read(args.db))
    fds = parse_fds(_read(args.fds), db.schema)
    try:
        kind = MeasureKind.parse(args.measure)
    except ValueError as e:
        raise ShapdbError(str(e)) from None
    cfg = InconsistencyConfig(engine=args.engine, approx=args.approx, eps=args.eps,
                              delta=args.delta, seed=args.seed, budget=args.budget,
                              perm_cap=args.perm_cap, subset_cap=args.subset_cap or 16,
                              workers=args.workers)
    results = shapi_all(db, fds, kind, cfg)
    expected = Fraction(graph_measure(conflict_graph(db, fds), kind, Budget(args.budget, "measure")))
    checksum = _checksum(results, expected, f"sum of values vs I_{kind.value}(D)")
    if args.facts is not None:
        missing = set(args.facts) - {r.fact for r in results}
        if missing:
            raise ShapdbError(f"unknown fact ids: {sorted(missing)}")
        results = [r for r in results if r.fact in set(args.facts)]
    report = {
        "schema_version": SCHEMA_VERSION,
        "command": "shapi",
        "inputs": {"db": args.db, "fds": args.fds},
        "config": {"engine": args.engine, "approx": args.approx, "eps": args.eps,
                   "delta": args.delta, "seed": args.seed, "measure": kind.value},
        "classification": tractability_report(fds, kind).as_dict(),
        "measure": {"kind": kind.value, "value": rational(expected)},
        "facts": _fact_entries(db, results),
        "checksum": checksum,
        "seed": args.seed,
    }
    return report, EXIT_CHECKSUM if checksum["matches"] is False else EXIT_OK


def run_classify(args) -> tuple[dict, int]:
    if not args.query and not args.fds:
        raise ShapdbError("classify needs --query and/or --fds")
    report: dict = {"schema_version": SCHEMA_VERSION, "command": "classify", "inputs": {}}
    if args.query:
        report["inputs"]["query"] = args.query
        report["query"] = classification_report(parse_query(_read(args.query)))
    if args.fds:
        report["inputs"]["fds"] = args.fds
        fds = parse_fds(_read(args.fds))
        chain = lhs_chain_classify(fds)
        if args.measure:
            try:
                kinds = [MeasureKind.parse(args.measure)]
            except ValueError as e:
                raise ShapdbError(str(e)) from None
        else:
            kinds = list(MeasureKind)
        report["fds"] = {
            "lhs_chain_after_normalization": chain.chain,
            "normalized": [str(fd) for fd in chain.normalized],
            "verdicts": [tractability_report(fds, k).as_dict() for k in kinds],
        }
    return report, EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    runner = {"shapq": run_shapq, "shapi": run_shapi, "classify": run_classify}[args.command]
    started = time.perf_counter()
    try:
        report, code = runner(args)
    except BudgetExceeded as e:
        print(f"shapdb: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except (ShapdbError, ValueError) as e:
        print(f"shapdb: {e}", file=sys.stderr)
        return EXIT_INPUT
    if getattr(args, "timing", False):
        report["timing_seconds"] = round(time.perf_counter() - started, 6)
    text = json.dumps(report, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    if code == EXIT_CHECKSUM:
        print("shapdb: efficiency checksum failed for an exact engine", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
