"""Command line entry point.

Subcommands:
  run      simulate a scenario headless, write the trace, check assertions
  analyze  print the worst-case force/gain budget
  serve    interactive real-time-paced mode with the websocket bridge
  metrics  recompute the metric summary from a saved trace CSV

Exit codes: 0 success, 1 failure (bad input, failed assertion, no margin),
2 simulation aborted on a non-finite state.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import replace
from pathlib import Path

from .engine import check_assertions, run_scenario, trace_metrics
from .errors import EmptyTrace, NoMargin, NonFiniteState, Overloaded, RopeInfeasible
from .scenario import bundled_scenario_names, load_scenario
from .trace import read_csv, write_csv, write_jsonl
from .worstcase import WorstCaseInputs, gain_inequality

METRIC_ORDER = [
    "max_edge_error",
    "final_edge_error",
    "payload_swing",
    "max_tilt",
    "max_tension",
    "max_axis_accel",
    "velocity_tracking_error",
    "guidance_time_constant",
    "duration",
    "records",
]


def _print_metrics(metrics: dict) -> None:
    for key in METRIC_ORDER:
        print(f"{key} = {metrics[key]:.6g}")


def cmd_run(args) -> int:
    try:
        scenario = load_scenario(args.scenario)
    except FileNotFoundError as exc:
        names = ", ".join(bundled_scenario_names())
        print(f"error: {exc}\nbundled scenarios: {names}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    output = Path(args.output) if args.output else Path(f"{scenario.name}_trace.csv")
    try:
        trace = run_scenario(scenario, seed_override=args.seed)
    except NonFiniteState as exc:
        print(f"error: {exc}", file=sys.stderr)
        if exc.partial_trace is not None:
            write_csv(exc.partial_trace, output)
            print(f"partial trace written to {output}", file=sys.stderr)
        return 2

    write_csv(trace, output)
    if args.jsonl:
        write_jsonl(trace, Path(args.jsonl))
    metrics = trace_metrics(trace)
    if not args.quiet:
        print(f"scenario {scenario.name}: trace written to {output}")
        _print_metrics(metrics)

    failed = False
    for key, ok, value, bound in check_assertions(metrics, scenario.assertions):
        status = "PASS" if ok else "FAIL"
        print(f"{status} {key}: {value:.6g} <= {bound:.6g}")
        failed = failed or not ok
    return 1 if failed else 0


def cmd_analyze(args) -> int:
    inputs = WorstCaseInputs()
    overrides = {
        "m_vehicle": args.vehicle_mass,
        "M_payload": args.payload_mass,
        "F_max_total": args.max_thrust,
        "l": args.rope_length,
        "share_fraction": args.share_fraction,
        "z_side_worst": args.worst_side,
        "max_speed": args.max_speed,
        "max_edge_error": args.max_edge_error,
        "attitude_clamp": args.attitude_clamp,
    }
    inputs = replace(inputs, **{k: v for k, v in overrides.items() if v is not None})
    try:
        budget = gain_inequality(args.c1, args.c2, args.mu_r, inputs)
    except (Overloaded, NoMargin, RopeInfeasible) as exc:
        message = {"error": type(exc).__name__, "detail": str(exc)}
        if args.json:
            print(json.dumps(message, sort_keys=True))
        else:
            print(f"{message['error']}: {message['detail']}", file=sys.stderr)
        return 1
    if args.json:
        print(json.dumps(budget.as_dict(), indent=2, sort_keys=True))
    else:
        for key, value in budget.as_dict().items():
            print(f"{key} = {value}")
        verdict = "holds" if budget.gains_ok else "violated"
        print(f"gain inequality {verdict} at c1={budget.c1} c2={budget.c2} mu_r={budget.mu_r}")
    return 0 if budget.gains_ok else 1


def cmd_serve(args) -> int:
    try:
        scenario = load_scenario(args.scenario)
    except (FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    from .server import serve

    print(f"serving {scenario.name} on ws://{args.host}:{args.port}/ws")
    serve(scenario, args.host, args.port, args.time_scale)
    return 0


def cmd_metrics(args) -> int:
    try:
        trace = read_csv(args.trace)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (EmptyTrace, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    metrics = trace_metrics(trace)
    if args.json:
        # Undefined metrics (e.g. no translation stretch to grade) become
        # null rather than the NaN literal strict parsers reject.
        clean = {
            k: (None if isinstance(v, float) and math.isnan(v) else v)
            for k, v in metrics.items()
        }
        print(json.dumps(clean, indent=2, sort_keys=True))
    else:
        _print_metrics(metrics)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="swarmlift",
        description="deterministic multi-rotorcraft formation simulator",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("run", help="simulate a scenario headless")
    p.add_argument("scenario", help="scenario JSON path or bundled name")
    p.add_argument("--output", default=None, help="trace CSV path")
    p.add_argument("--jsonl", default=None, help="also write the trace as JSON lines")
    p.add_argument("--seed", type=int, default=None, help="override the scenario rng seed")
    p.add_argument("--quiet", action="store_true", help="suppress the metrics summary")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("analyze", help="worst-case force/gain budget")
    p.add_argument("--vehicle-mass", type=float, default=None)
    p.add_argument("--payload-mass", type=float, default=None)
    p.add_argument("--max-thrust", type=float, default=None, help="total per-vehicle thrust, N")
    p.add_argument("--rope-length", type=float, default=None)
    p.add_argument("--share-fraction", type=float, default=None)
    p.add_argument("--worst-side", type=float, default=None, help="square side at the worst pose")
    p.add_argument("--max-speed", type=float, default=None)
    p.add_argument("--max-edge-error", type=float, default=None)
    p.add_argument("--attitude-clamp", type=float, default=None)
    p.add_argument("--c1", type=float, default=0.17, help="damping gain")
    p.add_argument("--c2", type=float, default=0.55, help="shape gain")
    p.add_argument("--mu-r", type=float, default=0.2, help="rotation rate bound")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("serve", help="interactive websocket mode")
    p.add_argument("scenario", nargs="?", default="hold_square")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8765)
    p.add_argument("--time-scale", type=float, default=1.0, help="sim seconds per wall second")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("metrics", help="summarize a saved trace CSV")
    p.add_argument("trace")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_metrics)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
