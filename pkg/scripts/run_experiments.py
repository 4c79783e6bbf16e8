#!/usr/bin/env python3
"""Run the two-scenario lockdown experiment end to end and print a summary.

For each builtin scenario this runs a base in-process pass plus ten seeded
trials (scripted waypoints jittered by up to 0.5 m), then reports the
approach-event totals and verdicts. Pass --service URL to drive a freshly
started service over HTTP instead of the in-process core.
"""

import argparse
import json
from pathlib import Path

from tracelock.scenarios import BUILTIN_SCENARIOS
from tracelock.simulator import run_scenario, run_trials

TRIAL_JITTER_M = 0.5


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--service", default=None, help="base URL of a live service")
    parser.add_argument("--trials", type=int, default=10)
    parser.add_argument("--out", default=None, help="write the summary JSON here")
    args = parser.parse_args()

    summary = {}
    for name, build in sorted(BUILTIN_SCENARIOS.items()):
        scenario = build()
        base = run_scenario(scenario, args.service)
        trials = run_trials(scenario, args.trials, jitter_m=TRIAL_JITTER_M)
        summary[name] = {
            "base": base.to_dict(),
            "trials": trials.to_dict(),
        }
        print(f"{name}")
        print(f"  region          {base.region_id}")
        print(f"  fixes ingested  {base.fix_count}")
        print(f"  approach events {base.aeo_total}")
        print(f"  verdict         {base.verdict}")
        print(f"  notifications   {base.notification_counts or '{}'}")
        print(
            f"  {args.trials} trials      verdicts {set(trials.verdicts)} "
            f"aeo {sorted(set(trials.aeo_totals))} "
            f"consistent={trials.consistent}"
        )
    if args.out:
        Path(args.out).write_text(json.dumps(summary, indent=2) + "\n")
        print(f"summary written to {args.out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
