"""Command-line interface.

Exit codes: 0 every check passed, 1 a check failed, 2 cheese construction
failed, 3 unreadable or malformed input / output error.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

from .derivation import (
    cyclicity_check,
    fubini_check,
    cauchy_split_check,
    l1_unboundedness_demo,
    morris_bound_check,
    oracle_agreement_check,
    restriction_bound_check,
)
from .geometry import ConstructionError, SwissCheese, budget_certificate, certified_bound, generate_cheese
from .quadrature import ConvergenceError, OracleInapplicableError
from .rational import PoleEvaluationError, RationalFunction, pole_clearance
from .render import render_svg
from .report import RunConfig, dumps_report, run_verification

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONSTRUCTION = 2
EXIT_IO = 3

log = logging.getLogger("swisscheese")

# flag dest -> RunConfig field
_FLAG_FIELDS = {
    "c": "C",
    "annuli": "annuli",
    "discs_per_annulus": "discs_per_annulus",
    "seed": "seed",
    "pairs": "sweep_pairs",
    "triples": "sweep_triples",
    "max_degree": "max_degree",
    "max_poles": "max_poles",
    "min_clearance": "min_clearance",
    "rho": "rho",
}


class InputError(Exception):
    pass


def _config_parent() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", type=Path, help="JSON file with RunConfig fields")
    p.add_argument("--c", type=float, help="budget constant C (default 1)")
    p.add_argument("--annuli", type=int, help="number of annuli (default 4)")
    p.add_argument("--discs-per-annulus", type=int, help="discs per annulus (default 3)")
    p.add_argument("--seed", type=int, help="random seed (default 7)")
    p.add_argument("--pairs", type=int, help="random (f, g) pairs; 0 keeps only structural checks")
    p.add_argument("--triples", type=int, help="random (f, g, h) triples for the Leibniz rule")
    p.add_argument("--max-degree", type=int)
    p.add_argument("--max-poles", type=int)
    p.add_argument("--min-clearance", type=float)
    p.add_argument("--rho", type=float, help="radius of the outer Cauchy contour (default 1.25)")
    p.add_argument("--jobs", type=int, help="worker processes (default: CPU count)")
    return p


def load_config(args: argparse.Namespace) -> RunConfig:
    data: dict = {}
    if getattr(args, "config", None):
        try:
            data = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read config {args.config}: {exc}") from exc
    for flag, name in _FLAG_FIELDS.items():
        value = getattr(args, flag, None)
        if value is not None:
            data[name] = value
    try:
        return RunConfig.from_dict(data)
    except (TypeError, ValueError) as exc:
        raise InputError(f"invalid config: {exc}") from exc


def read_cheese(path: Path) -> SwissCheese:
    try:
        return SwissCheese.from_json(Path(path).read_text(encoding="utf-8"))
    except (OSError, UnicodeDecodeError, json.JSONDecodeError, KeyError, TypeError,
            ValueError) as exc:
        raise InputError(f"cannot load cheese from {path}: {exc}") from exc


def _write(path: Path, text: str) -> None:
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot write {path}: {exc}") from exc


def cmd_generate(args: argparse.Namespace) -> int:
    cfg = load_config(args)
    try:
        cheese = generate_cheese(cfg.C, cfg.annuli, cfg.discs_per_annulus, cfg.seed)
    except ConstructionError as exc:
        print(f"construction failed: {exc}", file=sys.stderr)
        return EXIT_CONSTRUCTION
    out = args.out or Path("cheese.json")
    _write(out, cheese.to_json())
    bound = certified_bound(cheese)
    print(f"wrote {out}: {len(cheese.discs)} discs")
    print(f"certified_bound\t{bound!r}")
    print(f"bound <= C\t{bound <= cheese.C}")
    print(f"exact 4pi*sum <= C/2\t{budget_certificate(cheese)}")
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    cheese = read_cheese(args.cheese)
    cfg = load_config(args)
    report, timings = run_verification(cheese, cfg, args.jobs)
    out = args.out or Path("report.json")
    _write(out, dumps_report(report))
    _write(Path(str(out) + ".timings.json"), json.dumps(timings, indent=1) + "\n")
    for name, s in report["summary"].items():
        status = "PASS" if s["failed"] == 0 else "FAIL"
        print(f"{status}\t{name}\t{s['total'] - s['failed']}/{s['total']}")
    print(f"report\t{out}")
    return EXIT_OK if report["pass"] else EXIT_CHECK_FAILED


def cmd_render(args: argparse.Namespace) -> int:
    cheese = read_cheese(args.cheese)
    out = args.out or Path("cheese.svg")
    _write(out, render_svg(cheese))
    print(f"wrote {out}")
    return EXIT_OK


def cmd_demo_unbounded(args: argparse.Namespace) -> int:
    if args.n_max < 1:
        raise InputError("--n-max must be >= 1")
    cheese = read_cheese(args.cheese) if args.cheese else None
    rows = l1_unboundedness_demo(args.n_max, cheese=cheese)
    print("n\tsup_X|z^n|\tL1_T((z^n)')\t2*pi*n\tok")
    for r in rows:
        print(f"{r.n}\t{r.sup_norm:.15g}\t{r.l1_norm:.15g}\t{2 * math.pi * r.n:.15g}\t{r.ok}")
    increasing = all(a.l1_norm < b.l1_norm for a, b in zip(rows, rows[1:]))
    return EXIT_OK if increasing and all(r.ok for r in rows) else EXIT_CHECK_FAILED


def _parse_function(text: str, what: str) -> RationalFunction:
    try:
        return RationalFunction.from_json(text)
    except (json.JSONDecodeError, KeyError, TypeError, ValueError, IndexError) as exc:
        raise InputError(f"cannot parse {what}: {exc}") from exc


def cmd_pair_test(args: argparse.Namespace) -> int:
    f = _parse_function(args.f, "--f")
    g = _parse_function(args.g, "--g")
    cheese = read_cheese(args.cheese) if args.cheese else None
    rho = args.rho or 1.25
    checks = [
        lambda: oracle_agreement_check(f, g),
        lambda: cyclicity_check(f, g),
        lambda: restriction_bound_check(f, g),
    ]
    if cheese is not None:
        clear = min(pole_clearance(f, cheese), pole_clearance(g, cheese))
        if not clear > 0:
            print(f"a pole lies on X (clearance {clear})", file=sys.stderr)
            return EXIT_IO
        checks += [
            lambda: morris_bound_check(f, g, cheese),
            lambda: cauchy_split_check(f, cheese, rho),
            lambda: fubini_check(f, g, cheese, rho),
        ]
    records = []
    ok = True
    for run in checks:
        try:
            rec = run().to_dict()
        except (ConvergenceError, OracleInapplicableError, PoleEvaluationError, ValueError) as exc:
            rec = {"check": "aborted", "pass": False, "detail": {"error": str(exc)}}
        ok = ok and rec["pass"]
        records.append(rec)
    print(json.dumps({"pass": ok, "records": records}, indent=1, sort_keys=True))
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="swisscheese",
        description="Build truncated Swiss cheese sets and verify the derivation "
        "D(f)(g) = int_T f'(z) g(z) dz numerically.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    parent = _config_parent()

    p = sub.add_parser("generate", parents=[parent], help="write a cheese JSON file")
    p.add_argument("--out", type=Path, help="output path (default cheese.json)")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("verify", parents=[parent], help="run every check, write a JSON report")
    p.add_argument("cheese", type=Path)
    p.add_argument("--out", type=Path, help="report path (default report.json)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("render", help="draw a cheese as SVG")
    p.add_argument("cheese", type=Path)
    p.add_argument("--out", type=Path, help="SVG path (default cheese.svg)")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("demo-unbounded", help="L1 norms of (z^n)' against |z^n|_X")
    p.add_argument("--n-max", type=int, default=8)
    p.add_argument("--cheese", type=Path)
    p.set_defaults(func=cmd_demo_unbounded)

    p = sub.add_parser("pair-test", help="check one pair f, g given as JSON")
    p.add_argument("--f", required=True, help='e.g. \'{"num": [[0,0],[1,0]], "factors": []}\'')
    p.add_argument("--g", required=True)
    p.add_argument("--cheese", type=Path)
    p.add_argument("--rho", type=float)
    p.set_defaults(func=cmd_pair_test)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except InputError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_IO


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
