"""Command-line front end.

Reports go to stdout as JSON (keys sorted, so identical invocations give
identical bytes) or as an aligned text table; diagnostics go to stderr.

Exit codes: 0 success, 1 a check failed, 2 usage error, 3 input error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import fields, replace
from typing import Optional, Sequence

from .certify import DEFAULT_FAMILIES, SUITES, Check, Gate, all_passed, info, run_suite
from .copula import ContractViolation, DimensionCapError, enumerate_marginals
from .estimation import EstimatorConfig, InputError, empirical_copula, read_csv
from .grammar import CopulaSpecError, parse_copula
from .identities import ubeda_identity_rhs
from .measures import TABLE_FAMILIES, MeasureFamily, kappa, parse_family

log = logging.getLogger("mvconcord")

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_INPUT = 0, 1, 2, 3
CONFIG_ENV = "MVCONCORD_CONFIG"

GRAMMAR_HELP = """copula specs (whitespace ignored, indices 1-based):
  Pi(n)  M(n)  En(n,theta)          independence, comonotone, perturbed independence
  prod(A,B)                         A(x) B(y), dimension dim A + dim B
  mix(w,A,B)                        (1-w) A + w B
  perm(p1,...,pn)*C                 C(x_p1, ..., x_pn)
  refl(i,j,...)*C                   reflections sigma_i^* sigma_j^* ... C
  marg(C; drop=i,j,...)             C with coordinates i, j, ... set to 1
example: "refl(1)*M(4)", "mix(0.3,Pi(3),M(3))", "prod(Pi(1),En(4,0.9))"
"""


class UsageError(Exception):
    pass


def _families(names: Optional[Sequence[str]], default) -> tuple[MeasureFamily, ...]:
    if not names:
        return tuple(default)
    out: list[MeasureFamily] = []
    for name in names:
        if name.strip().lower() == "all":
            out.extend(f for f in default if f not in out)
            continue
        try:
            fam = parse_family(name)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        if fam not in out:
            out.append(fam)
    return tuple(out)


def load_config(args: argparse.Namespace) -> tuple[EstimatorConfig, Gate]:
    """Defaults, then the JSON file named by ``--config`` or the environment, then flags."""
    values: dict = {}
    path = args.config or os.environ.get(CONFIG_ENV)
    if path:
        try:
            with open(path) as fh:
                values = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read config {path}: {exc}") from None
        if not isinstance(values, dict):
            raise InputError(f"config {path} must hold a JSON object")
    known = {f.name for f in fields(EstimatorConfig)} | {"sigmas"}
    unknown = sorted(set(values) - known)
    if unknown:
        raise InputError(f"unknown config keys: {', '.join(unknown)}")
    sigmas = float(values.pop("sigmas", 5.0))
    overrides = {
        "mc_samples": args.samples,
        "seed": args.seed,
        "grid_resolution": args.grid,
        "diag_quadrature_points": args.quad_points,
        "workers": args.workers,
    }
    values.update({k: v for k, v in overrides.items() if v is not None})
    if args.monte_carlo:
        values["exact_preferred"] = False
    if args.sigmas is not None:
        sigmas = args.sigmas
    try:
        config = replace(EstimatorConfig(), **values)
    except (TypeError, ValueError) as exc:
        raise InputError(f"invalid configuration: {exc}") from None
    return config, Gate(sigmas=sigmas)


def _row(name: str, result) -> Check:
    return info(name, result)


def cmd_measure(args, config: EstimatorConfig, gate: Gate) -> list[Check]:
    try:
        C = parse_copula(args.copula)
    except CopulaSpecError as exc:
        raise UsageError(str(exc)) from None
    fams = _families(args.family, TABLE_FAMILIES)
    log.info("measuring %s (dim %d) with %s", C, C.dim, ", ".join(map(str, fams)))
    return [_row(f"{fam}[{args.copula}]", kappa(fam, C, config)) for fam in fams]


def cmd_data(args, config: EstimatorConfig, gate: Gate) -> list[Check]:
    data = read_csv(args.csv)
    C = empirical_copula(data)
    fams = _families(args.family, TABLE_FAMILIES)
    n = C.dim
    log.info("empirical copula of %d rows, %d columns", C.size, n)
    rows: list[Check] = []
    for fam in fams:
        rows.append(_row(f"{fam} kappa_{n}", kappa(fam, C, config)))
        if n > 2:
            for retained, A in enumerate_marginals(C, 2):
                cols = ",".join(map(str, retained))
                rows.append(_row(f"{fam} kappa_2[{cols}]", kappa(fam, A, config)))
    if args.ubeda_check:
        if n < 3 or n % 2 == 0:
            raise InputError(f"--ubeda-check needs an odd number of columns >= 3, got {n}")
        for fam in fams:
            lhs = kappa(fam, C, config)
            rhs = ubeda_identity_rhs(fam, C, config)
            rows.append(_row(f"{fam} ubeda rhs", rhs))
            rows.append(_row(f"{fam} ubeda residual kappa_{n} - rhs", lhs - rhs))
    return rows


def cmd_certify(args, config: EstimatorConfig, gate: Gate) -> list[Check]:
    fams = _families(args.family, DEFAULT_FAMILIES)
    return run_suite(args.suite, fams, config, gate)


def _command_echo(args: argparse.Namespace) -> dict:
    skip = {"func", "config", "samples", "seed", "grid", "quad_points", "workers", "monte_carlo",
            "sigmas", "format", "verbose"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def render_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, allow_nan=True) + "\n"


def _fmt(x) -> str:
    if x is None:
        return "-"
    if isinstance(x, bool):
        return "pass" if x else "FAIL"
    if isinstance(x, float):
        return f"{x:.12g}"
    return str(x)


def render_text(report: dict) -> str:
    head = ["name", "value", "method", "std_error", "expected", "pass"]
    body = [
        [r["name"], _fmt(r["value"]), r["method"], _fmt(r["std_error"]), _fmt(r["expected"]), _fmt(r["passed"])]
        for r in report["results"]
    ]
    widths = [max(len(row[i]) for row in [head] + body) for i in range(len(head))]
    lines = [f"# {json.dumps(report['command'], sort_keys=True)}", f"# config {json.dumps(report['config'], sort_keys=True)}"]
    for row in [head] + body:
        lines.append("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip())
    if report["passed"] is not None:
        lines.append(f"# {'all checks passed' if report['passed'] else 'some checks FAILED'}")
    return "\n".join(lines) + "\n"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("evaluation")
    g.add_argument("--samples", type=int, help="Monte Carlo sample count (default 1000000)")
    g.add_argument("--seed", type=int, help="master seed (default 42)")
    g.add_argument("--grid", type=int, help="grid resolution for grid checks (default 64)")
    g.add_argument("--quad-points", type=int, help="odd Simpson point count per diagonal (default 2049)")
    g.add_argument("--workers", type=int, help="Monte Carlo worker threads; results do not depend on it")
    g.add_argument("--monte-carlo", action="store_true", help="prefer Monte Carlo over exact routes")
    g.add_argument("--sigmas", type=float, help="standard-error gate for stochastic checks (default 5)")
    g.add_argument("--config", help=f"JSON config file (also read from ${CONFIG_ENV})")
    g.add_argument("--format", choices=("json", "text"), default="json")
    g.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")

    parser = _Parser(
        prog="mvconcord",
        description="Multivariate measures of concordance for copulas and data.",
        epilog=GRAMMAR_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    fam_help = "spearman, gini, blomqvist, kendall, scarsini[:base] or all; repeatable"
    p = sub.add_parser("measure", parents=[common], help="concordance of a copula expression",
                       epilog=GRAMMAR_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--copula", required=True, help="copula spec, see below")
    p.add_argument("--family", action="append", help=fam_help)
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("data", parents=[common], help="concordance of the empirical copula of a CSV file")
    p.add_argument("csv", help="numeric CSV, one observation per row; optional header row")
    p.add_argument("--family", action="append", help=fam_help)
    p.add_argument("--ubeda-check", action="store_true",
                   help="odd column count: report kappa_n minus its even-marginal expansion")
    p.set_defaults(func=cmd_data)

    p = sub.add_parser("certify", parents=[common], help="run an invariant suite")
    p.add_argument("suite", choices=SUITES + ("all",))
    p.add_argument("--family", action="append", help=fam_help)
    p.set_defaults(func=cmd_certify)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s", stream=sys.stderr)
    try:
        config, gate = load_config(args)
        rows = args.func(args, config, gate)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InputError, DimensionCapError, ContractViolation, OSError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    checked = [r for r in rows if r.passed is not None]
    passed = all_passed(rows) if checked else None
    report = {
        "command": _command_echo(args),
        "config": {**config.to_dict(), "sigmas": gate.sigmas},
        "results": [r.to_dict() for r in rows],
        "passed": passed,
    }
    sys.stdout.write(render_text(report) if args.format == "text" else render_json(report))
    if passed is False:
        failed = [r.name for r in rows if r.passed is False]
        print(f"{len(failed)} check(s) failed, first: {failed[0]}", file=sys.stderr)
        return EXIT_FAILED
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
