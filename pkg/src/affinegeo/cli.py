"""Command-line interface: scenario verification, variation runs, and the
bundled fixture library.  All output is a single JSON document on stdout.

Exit codes: 0 all non-conditional checks pass; 1 a check failed;
2 schema/parse/validation error; 3 runtime evaluation failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from . import checks as C
from . import variation as V
from .expr import DomainError, ParseError
from .geometry import SingularMetric
from .scenario import (SchemaError, ValidationError, load_family,
                       load_scenario)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_SCHEMA = 2
EXIT_RUNTIME = 3


def _emit(payload, out_path=None):
    text = json.dumps(payload, indent=2, sort_keys=True)
    print(text)
    if out_path:
        Path(out_path).write_text(text + "\n")


def _error_payload(kind, err):
    return {"schema": C.REPORT_SCHEMA,
            "engine": {"name": "affinegeo", "version": __version__},
            "error": {"kind": kind, "message": str(err)}}


def fixture_dir():
    return resources.files("affinegeo") / "fixtures"


def fixture_names():
    """Bundled scenario fixtures (family files are companions, not scenarios)."""
    return sorted(p.name[:-5] for p in fixture_dir().iterdir()
                  if p.name.endswith(".toml") and not p.name.endswith("_family.toml"))


def fixture_path(name):
    path = fixture_dir() / f"{name}.toml"
    if not path.is_file():
        raise SchemaError(f"unknown fixture {name!r}; "
                          f"available: {', '.join(fixture_names())}")
    return path


def _cmd_verify(args):
    scenario = load_scenario(args.scenario, known_checks=C.CHECKS)
    checks = args.checks.split(",") if args.checks else None
    report = C.run(scenario, checks=checks, points=args.points,
                   seed=args.seed, threads=args.threads)
    _emit(report.to_dict(), args.out)
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


def _cmd_variation(args):
    scenario = load_scenario(args.scenario, known_checks=C.CHECKS)
    family = load_family(args.family, scenario.spec)
    if args.t0:
        family = V.DeformationFamily(base=family.base, s=family.s,
                                     delta=family.delta, h=family.h,
                                     t0=float(args.t0))
    t_start = time.perf_counter()
    seed = args.seed if args.seed is not None else scenario.seed
    n_points = args.points if args.points is not None else min(scenario.points, 10)
    rng = np.random.default_rng([seed, 0x7A71])
    pts = scenario.spec.chart.sample(rng, n_points)

    pointwise = []
    worst_rel = 0.0
    for which in V.VARIATION_KINDS:
        rec_worst = 0.0
        for p in pts:
            out = V.first_variation_pointwise(family, p, which)
            rec_worst = max(rec_worst, out.rel_err)
        worst_rel = max(worst_rel, rec_worst)
        pointwise.append({"which": which, "points": int(n_points),
                          "max_rel_err": rec_worst, "tolerance": 1e-6,
                          "passed": rec_worst <= 1e-6})

    action = None
    if scenario.box is not None:
        res = args.resolution or scenario.box.resolution
        av = V.action_variation(family, scenario.box, resolution=res)
        action = {"resolution": av.resolution, "numeric": av.numeric,
                  "analytic": av.analytic, "abs_err": av.abs_err,
                  "rel_err": av.rel_err, "tolerance": 1e-3,
                  "passed": av.rel_err <= 1e-3}

    ok = worst_rel <= 1e-6 and (action is None or action["passed"])
    payload = {
        "schema": C.REPORT_SCHEMA,
        "engine": {"name": "affinegeo", "version": __version__},
        "scenario": scenario.id,
        "family": str(args.family),
        "seed": seed,
        "pointwise": pointwise,
        "action": action,
        "passed": ok,
        "wall_time_s": time.perf_counter() - t_start,
    }
    _emit(payload, args.out)
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def _cmd_fixtures(args):
    if args.action == "list":
        _emit({"schema": C.REPORT_SCHEMA,
               "engine": {"name": "affinegeo", "version": __version__},
               "fixtures": fixture_names()}, args.out)
        return EXIT_OK
    scenario = load_scenario(fixture_path(args.name), known_checks=C.CHECKS)
    report = C.run(scenario, points=args.points, seed=args.seed,
                   threads=args.threads)
    _emit(report.to_dict(), args.out)
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


def build_parser():
    parser = argparse.ArgumentParser(
        prog="affinegeo",
        description="Residual checks for affine-metric chart geometry.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_verify = sub.add_parser("verify", help="run named checks on a scenario file")
    p_verify.add_argument("--scenario", required=True)
    p_verify.add_argument("--checks", help="comma-separated check subset")
    p_verify.add_argument("--points", type=int)
    p_verify.add_argument("--seed", type=int)
    p_verify.add_argument("--threads", type=int)
    p_verify.add_argument("--out", help="also write the JSON report here")
    p_verify.add_argument("--json", action="store_true",
                          help="JSON output (the only mode; accepted for symmetry)")
    p_verify.set_defaults(fn=_cmd_verify)

    p_var = sub.add_parser("variation", help="first-variation run for a deformation family")
    p_var.add_argument("--scenario", required=True)
    p_var.add_argument("--family", required=True)
    p_var.add_argument("--resolution", type=int)
    p_var.add_argument("--t0", type=float)
    p_var.add_argument("--points", type=int)
    p_var.add_argument("--seed", type=int)
    p_var.add_argument("--out")
    p_var.add_argument("--json", action="store_true")
    p_var.set_defaults(fn=_cmd_variation)

    p_fix = sub.add_parser("fixtures", help="list or run the bundled fixtures")
    p_fix.add_argument("action", choices=["list", "run"])
    p_fix.add_argument("name", nargs="?")
    p_fix.add_argument("--points", type=int)
    p_fix.add_argument("--seed", type=int)
    p_fix.add_argument("--threads", type=int)
    p_fix.add_argument("--out")
    p_fix.add_argument("--json", action="store_true")
    p_fix.set_defaults(fn=_cmd_fixtures)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "fixtures" and args.action == "run" and not args.name:
        parser.error("fixtures run requires a fixture name")
    try:
        return args.fn(args)
    except (SchemaError, ValidationError, ParseError) as err:
        _emit(_error_payload("schema", err), getattr(args, "out", None))
        return EXIT_SCHEMA
    except (DomainError, SingularMetric, ArithmeticError) as err:
        _emit(_error_payload("runtime", err), getattr(args, "out", None))
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
