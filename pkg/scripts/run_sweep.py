#!/usr/bin/env python3
"""Run the overlay-size sweep and print a smartfog vs unoptimized comparison.

Thin front end over smartfog.harness.run_experiment: same defaults, same CSV
outputs, plus a per-size digest of the two headline metrics (median SPA loop
delay and median network load).
"""

import argparse
import csv
import statistics
import sys
from pathlib import Path

from smartfog.harness import ExperimentConfig, run_experiment


def load_config(args: argparse.Namespace) -> ExperimentConfig:
    config = (
        ExperimentConfig.from_file(args.config) if args.config else ExperimentConfig()
    )
    if args.sizes:
        config.sizes = tuple(int(s) for s in args.sizes.split(","))
    if args.reps is not None:
        config.replications = args.reps
    if args.seed is not None:
        config.seed_base = args.seed
    if args.jobs is not None:
        config.jobs = args.jobs
    config.out_dir = str(args.out)
    config.validate()
    return config


def digest(results_path: Path) -> str:
    cells: dict[tuple[str, int], list[dict]] = {}
    with results_path.open(newline="") as fh:
        for row in csv.DictReader(fh):
            cells.setdefault((row["mode"], int(row["n_devices"])), []).append(row)
    sizes = sorted({size for _, size in cells})
    lines = [f"{'n':>4} {'spa smart':>10} {'spa base':>10} {'load smart':>12} {'load base':>12} {'reduction':>10}"]
    for size in sizes:
        smart = cells[("smartfog", size)]
        base = cells[("unoptimized", size)]
        spa_s = statistics.median(float(r["spa_median_ms"]) for r in smart)
        spa_b = statistics.median(float(r["spa_median_ms"]) for r in base)
        load_s = statistics.median(int(r["network_load_bytes"]) for r in smart)
        load_b = statistics.median(int(r["network_load_bytes"]) for r in base)
        lines.append(
            f"{size:>4} {spa_s:>8.0f}ms {spa_b:>8.0f}ms {load_s:>11}B {load_b:>11}B "
            f"{1.0 - load_s / load_b:>9.1%}"
        )
    return "\n".join(lines)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--config", type=Path, help="JSON config file")
    parser.add_argument("--sizes", help="comma-separated overlay sizes")
    parser.add_argument("--reps", type=int, help="replications per cell")
    parser.add_argument("--seed", type=int, help="base seed")
    parser.add_argument("--jobs", type=int, help="worker processes")
    parser.add_argument("--out", type=Path, default=Path("results"))
    args = parser.parse_args(argv)

    config = load_config(args)
    results_path, summary_path = run_experiment(config)
    print(f"wrote {results_path} and {summary_path}")
    if set(m.value for m in config.modes) == {"smartfog", "unoptimized"}:
        print(digest(results_path))
    return 0


if __name__ == "__main__":
    sys.exit(main())
