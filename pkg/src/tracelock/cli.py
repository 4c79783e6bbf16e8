"""Command-line entry points: the `simulate` driver and `tracelock-serve`."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .api import serve
from .config import ServiceConfig
from .errors import TraceLockError
from .geo import write_trace
from .scenarios import BUILTIN_SCENARIOS, builtin_scenario
from .simulator import Scenario, generate_trace, run_scenario, run_trials

TRIALS_DEFAULT_JITTER_M = 0.5


def _load_scenario(ref: str) -> Scenario:
    path = Path(ref)
    if path.exists():
        return Scenario.from_file(path)
    scenario = builtin_scenario(ref)
    if scenario is None:
        known = ", ".join(sorted(BUILTIN_SCENARIOS))
        raise TraceLockError(
            f"scenario {ref!r} is neither a file nor a builtin (builtins: {known})"
        )
    return scenario


def _write_report(path: str | None, payload: dict) -> None:
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")


def simulate_main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="simulate",
        description="Generate mobility traces and drive scenarios through the service.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write a scenario's trace as JSON Lines")
    gen.add_argument("--scenario", required=True, help="scenario file or builtin name")
    gen.add_argument("--out", required=True, help="output trace path (.jsonl)")
    gen.add_argument("--seed", type=int, default=None)
    gen.add_argument("--jitter-m", type=float, default=None)

    run = sub.add_parser("run", help="run a scenario and report the verdict")
    run.add_argument("--scenario", required=True)
    run.add_argument("--service", default=None, help="base URL of a live service")
    run.add_argument("--seed", type=int, default=None)
    run.add_argument("--jitter-m", type=float, default=None)
    run.add_argument("--report", default=None, help="write the full run report JSON here")

    trials = sub.add_parser(
        "trials", help="repeat a scenario in-process over seeds 0..count-1"
    )
    trials.add_argument("--scenario", required=True)
    trials.add_argument("--count", type=int, default=10)
    trials.add_argument(
        "--jitter-m",
        type=float,
        default=TRIALS_DEFAULT_JITTER_M,
        help="scripted-waypoint jitter per trial (default %(default)s m)",
    )
    trials.add_argument("--report", default=None)

    args = parser.parse_args(argv)
    try:
        scenario = _load_scenario(args.scenario)
        if args.command == "generate":
            trace = generate_trace(scenario, seed=args.seed, jitter_m=args.jitter_m)
            write_trace(args.out, trace)
            print(f"wrote {len(trace)} fixes to {args.out}")
        elif args.command == "run":
            report = run_scenario(
                scenario, args.service, seed=args.seed, jitter_m=args.jitter_m
            )
            print(
                f"{report.scenario}: seed={report.seed} aeo_total={report.aeo_total} "
                f"verdict={report.verdict} fixes={report.fix_count} "
                f"runtime={report.runtime_s:.2f}s"
            )
            _write_report(args.report, report.to_dict())
        else:
            report = run_trials(scenario, args.count, jitter_m=args.jitter_m)
            for seed, verdict, aeo in zip(report.seeds, report.verdicts, report.aeo_totals):
                print(f"seed {seed}: aeo_total={aeo} verdict={verdict}")
            print(
                f"{report.scenario}: {len(report.seeds)} trials, "
                f"consistent={report.consistent} verdict={report.unanimous_verdict}"
            )
            _write_report(args.report, report.to_dict())
            if not report.consistent:
                return 1
    except TraceLockError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


def serve_main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="tracelock-serve", description="Run the central tracing service."
    )
    parser.add_argument("--config", required=True, help="service config JSON file")
    parser.add_argument(
        "--no-periodic-assessments",
        action="store_true",
        help="disable the background assessment timer",
    )
    args = parser.parse_args(argv)
    try:
        config = ServiceConfig.from_file(args.config)
        serve(config, periodic_assessments=not args.no_periodic_assessments)
    except TraceLockError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(simulate_main())
