"""Command-line front end.

Commands: `scenario run`, `lyapunov`, `orbits`, `pressure curve`, `detect`,
`reproduce`. Exit codes: 0 success, 2 validation error, 3 numerical
failure. All outputs are plain CSV/JSON written to explicit paths, and
identical configurations produce byte-identical files.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys

import numpy as np

from . import __version__
from .analysis import PressureCurve, analyze_curve, read_curve_csv, report_to_json, write_curve_csv
from .claims import list_claims, run_claim
from .errors import NumericalError, PressureLabError, ValidationError
from .maps import get_map, list_maps
from .markov import load_model, pressure
from .scenarios import parse_scenario_file
from .smooth2d import find_periodic_orbits, lyapunov_exponents

log = logging.getLogger("pressure_lab")

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3


def _setup_logging() -> None:
    level = os.environ.get("PRESSURE_LAB_LOG", "warn").lower()
    levels = {"error": logging.ERROR, "warn": logging.WARNING, "info": logging.INFO, "debug": logging.DEBUG}
    logging.basicConfig(level=levels.get(level, logging.WARNING), format="%(levelname)s %(name)s: %(message)s")


def _parse_params(pairs: list[str] | None) -> dict[str, float]:
    params: dict[str, float] = {}
    for pair in pairs or []:
        if "=" not in pair:
            raise ValidationError(f"--param expects key=value, got {pair!r}")
        key, value = pair.split("=", 1)
        try:
            params[key.strip()] = float(value)
        except ValueError:
            raise ValidationError(f"parameter {key!r} must be numeric, got {value!r}") from None
    return params


def _grid_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--t-min", type=float, default=-1.0)
    p.add_argument("--t-max", type=float, default=2.0)
    p.add_argument("--t-steps", type=int, default=1001)
    p.add_argument("--threads", type=int, default=os.cpu_count())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pressure-lab",
        description="Pressure functions, phase-transition detection, and Lyapunov tools",
    )
    parser.add_argument("--version", action="version", version=f"pressure-lab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    scenario = sub.add_parser("scenario", help="composite scenario tools")
    scenario_sub = scenario.add_subparsers(dest="subcommand", required=True)
    run = scenario_sub.add_parser("run", help="sample a scenario's pressure curve and detect transitions")
    run.add_argument("file", help="scenario spec file (key = value lines)")
    _grid_args(run)
    run.add_argument("--threshold", type=float, default=0.1, help="slope-gap threshold for kinks")
    run.add_argument("--plateau", type=float, default=0.0)
    run.add_argument("--band", type=float, default=0.02)
    run.add_argument("--out", default="curve.csv")
    run.add_argument("--report", default="report.json")
    run.add_argument("--seed", type=int, default=42)

    lyap = sub.add_parser("lyapunov", help="Lyapunov exponents for a built-in map")
    lyap.add_argument("--map", required=True, dest="map_name", metavar="NAME")
    lyap.add_argument("--param", action="append", metavar="K=V")
    lyap.add_argument("--x0", type=float)
    lyap.add_argument("--y0", type=float)
    lyap.add_argument("--starts", type=int, default=10)
    lyap.add_argument("--steps", type=int, default=10000)
    lyap.add_argument("--seed", type=int, default=42)
    lyap.add_argument("--out", default="lyapunov.csv")

    orbits = sub.add_parser("orbits", help="periodic orbits of a built-in map")
    orbits.add_argument("--map", required=True, dest="map_name", metavar="NAME")
    orbits.add_argument("--param", action="append", metavar="K=V")
    orbits.add_argument("--period", type=int, required=True)
    orbits.add_argument("--out", default="orbits.csv")

    pressure_cmd = sub.add_parser("pressure", help="pressure tools for model files")
    pressure_sub = pressure_cmd.add_subparsers(dest="subcommand", required=True)
    curve = pressure_sub.add_parser("curve", help="sample t -> P(t) for a Markov model file")
    curve.add_argument("--model", required=True)
    _grid_args(curve)
    curve.add_argument("--out", default="curve.csv")

    detect = sub.add_parser("detect", help="transition report for an existing curve CSV")
    detect.add_argument("--curve", required=True)
    detect.add_argument("--report", default="report.json")
    detect.add_argument("--threshold", type=float, default=0.1)
    detect.add_argument("--plateau", type=float, default=0.0)
    detect.add_argument("--band", type=float, default=0.02)

    repro = sub.add_parser("reproduce", help="re-run a recorded claim and compare")
    repro.add_argument("claim", nargs="?", help="claim id (see --list)")
    repro.add_argument("--all", action="store_true", dest="run_all")
    repro.add_argument("--list", action="store_true", dest="list_only")

    return parser


def _cmd_scenario_run(args) -> int:
    scenario = parse_scenario_file(args.file)
    log.info("built scenario %s", scenario.label)
    curve = scenario.sample_curve(args.t_min, args.t_max, args.t_steps, threads=args.threads)
    report = analyze_curve(
        curve,
        slope_gap_threshold=args.threshold,
        plateau_value=args.plateau,
        band=args.band,
    )
    write_curve_csv(curve, args.out)
    with open(args.report, "w", encoding="utf-8") as fh:
        fh.write(report_to_json(report) + "\n")
    kink_list = ", ".join(f"{k.t:.6g}" for k in report.kinks) or "none"
    freeze = f"t0={report.freezing.t0:.6g}" if report.freezing else "none"
    print(f"scenario: {scenario.label}")
    print(f"classification: {report.classification}")
    print(f"kinks: {kink_list}")
    print(f"freezing: {freeze}")
    print(f"wrote {args.out} and {args.report}")
    return EXIT_OK


def _cmd_lyapunov(args) -> int:
    m = get_map(args.map_name, **_parse_params(args.param))
    if args.x0 is not None and args.y0 is not None:
        starts = [(args.x0, args.y0)]
    else:
        rng = np.random.default_rng(args.seed)
        starts = [tuple(p) for p in rng.random((args.starts, 2))]
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write("x0,y0,lambda1,lambda2,sum\n")
        for x0, y0 in starts:
            l1, l2 = lyapunov_exponents(m, (x0, y0), args.steps)
            fh.write(f"{x0:.17g},{y0:.17g},{l1:.17g},{l2:.17g},{l1 + l2:.17g}\n")
    print(f"wrote {args.out} ({len(starts)} starts, {args.steps} steps each)")
    return EXIT_OK


def _cmd_orbits(args) -> int:
    m = get_map(args.map_name, **_parse_params(args.param))
    orbits = find_periodic_orbits(m, args.period)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write("orbit_id,period,x,y\n")
        for oid, orbit in enumerate(orbits):
            for px, py in orbit.points:
                fh.write(f"{oid},{orbit.period},{px:.17g},{py:.17g}\n")
    total = sum(o.period for o in orbits)
    print(f"wrote {args.out}: {len(orbits)} orbits, {total} fixed points of f^{args.period}")
    return EXIT_OK


def _cmd_pressure_curve(args) -> int:
    model = load_model(args.model)
    if not args.t_min < args.t_max:
        raise ValidationError("need --t-min < --t-max")
    if args.t_steps < 2:
        raise ValidationError("need --t-steps >= 2")
    ts = np.linspace(args.t_min, args.t_max, args.t_steps)
    if args.threads and args.threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=args.threads) as pool:
            values = list(pool.map(lambda t: pressure(model, t), ts))
    else:
        values = [pressure(model, t) for t in ts]
    write_curve_csv(PressureCurve(ts, np.array(values), source=args.model), args.out)
    print(f"wrote {args.out}")
    return EXIT_OK


def _cmd_detect(args) -> int:
    curve = read_curve_csv(args.curve)
    report = analyze_curve(
        curve,
        slope_gap_threshold=args.threshold,
        plateau_value=args.plateau,
        band=args.band,
    )
    with open(args.report, "w", encoding="utf-8") as fh:
        fh.write(report_to_json(report) + "\n")
    print(f"classification: {report.classification}")
    print(f"wrote {args.report}")
    return EXIT_OK


def _cmd_reproduce(args) -> int:
    if args.list_only:
        for cid, desc in list_claims():
            print(f"{cid:20s} {desc}")
        return EXIT_OK
    if args.run_all:
        ids = [cid for cid, _ in list_claims()]
    elif args.claim:
        ids = [args.claim]
    else:
        raise ValidationError("reproduce needs a claim id, --all, or --list")
    all_ok = True
    for cid in ids:
        result = run_claim(cid)
        all_ok &= result.passed
        print(f"== {cid}: {'PASS' if result.passed else 'FAIL'}")
        for line in result.lines:
            print(f"   {line}")
    return EXIT_OK if all_ok else EXIT_NUMERICAL


def main(argv: list[str] | None = None) -> int:
    _setup_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "scenario":
            return _cmd_scenario_run(args)
        if args.command == "lyapunov":
            return _cmd_lyapunov(args)
        if args.command == "orbits":
            return _cmd_orbits(args)
        if args.command == "pressure":
            return _cmd_pressure_curve(args)
        if args.command == "detect":
            return _cmd_detect(args)
        if args.command == "reproduce":
            return _cmd_reproduce(args)
        raise ValidationError(f"unknown command {args.command!r}")
    except ValidationError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericalError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except PressureLabError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
