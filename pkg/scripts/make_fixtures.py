#!/usr/bin/env python3
"""Regenerate the committed scenario files and fixture traces.

Outputs are deterministic, so reruns must be byte-identical to what is in
the tree (tests/test_simulator.py pins this).
"""

from pathlib import Path

from tracelock.geo import write_trace
from tracelock.scenarios import BUILTIN_SCENARIOS
from tracelock.simulator import generate_trace

ROOT = Path(__file__).resolve().parent.parent


def main() -> None:
    scenario_dir = ROOT / "scenarios"
    fixture_dir = ROOT / "tests" / "fixtures"
    scenario_dir.mkdir(exist_ok=True)
    fixture_dir.mkdir(parents=True, exist_ok=True)
    for name, build in sorted(BUILTIN_SCENARIOS.items()):
        scenario = build()
        scenario.to_file(scenario_dir / f"{name}.json")
        trace = generate_trace(scenario)
        write_trace(fixture_dir / f"{name}.jsonl", trace)
        print(f"{name}: {len(trace)} fixes")


if __name__ == "__main__":
    main()
