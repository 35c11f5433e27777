#!/usr/bin/env python3
"""Benchmark the selection pipeline stages and print per-size medians."""

import argparse
import sys
from pathlib import Path

from smartfog.harness import ExperimentConfig, timing_medians, timing_report


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.strip())
    parser.add_argument("--sizes", default="20,30,40", help="comma-separated overlay sizes")
    parser.add_argument("--reps", type=int, default=30, help="replications per size")
    parser.add_argument("--seed", type=int, default=1000, help="base seed")
    parser.add_argument("--out", type=Path, default=Path("results"))
    args = parser.parse_args(argv)

    config = ExperimentConfig(
        sizes=tuple(int(s) for s in args.sizes.split(",")),
        replications=args.reps,
        seed_base=args.seed,
        out_dir=str(args.out),
    )
    timing_path, summary_path = timing_report(config)
    print(f"wrote {timing_path} and {summary_path}")
    print(f"{'n':>4} {'betweenness':>12} {'sort+decide':>12} {'clustering':>12}")
    for size, cell in sorted(timing_medians(timing_path).items()):
        print(
            f"{size:>4} {cell['betweenness_ms']:>10.2f}ms "
            f"{cell['sorting_decision_ms']:>10.2f}ms {cell['clustering_ms']:>10.2f}ms"
        )
    return 0


if __name__ == "__main__":
    sys.exit(main())
