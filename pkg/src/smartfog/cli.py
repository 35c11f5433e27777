"""Command-line entry points: simulate, timing, cluster, select."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .clustering import areas_to_json
from .errors import SmartFogError
from .harness import ExperimentConfig, run_experiment, run_smartfog_pipeline, timing_report
from .overlay import build_overlay
from .simulation import Mode

log = logging.getLogger(__name__)


def _parse_csv_list(text: str, cast):
    return tuple(cast(part.strip()) for part in text.split(",") if part.strip())


def _load_config(args: argparse.Namespace) -> ExperimentConfig:
    if getattr(args, "config", None):
        config = ExperimentConfig.from_file(args.config)
    else:
        config = ExperimentConfig()
    if getattr(args, "sizes", None):
        config.sizes = _parse_csv_list(args.sizes, int)
    if getattr(args, "modes", None):
        config.modes = _parse_csv_list(args.modes, Mode)
    if getattr(args, "reps", None) is not None:
        config.replications = args.reps
    if getattr(args, "seed", None) is not None:
        config.seed_base = args.seed
    if getattr(args, "out", None):
        config.out_dir = str(args.out)
    if getattr(args, "jobs", None) is not None:
        config.jobs = args.jobs
    config.validate()
    return config


def _add_sweep_flags(parser: argparse.ArgumentParser, with_modes: bool = True) -> None:
    parser.add_argument("--config", type=Path, help="JSON config file")
    parser.add_argument("--sizes", help="comma-separated overlay sizes, e.g. 20,30,40")
    if with_modes:
        parser.add_argument("--modes", help="comma-separated modes: smartfog,unoptimized")
    parser.add_argument("--reps", type=int, help="replications per cell")
    parser.add_argument("--seed", type=int, help="base seed; replication r uses seed+r")
    parser.add_argument("--out", type=Path, help="output directory")
    parser.add_argument("--jobs", type=int, help="worker processes (default: cpu count)")


def _add_single_overlay_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--n", type=int, default=20, help="overlay size")
    parser.add_argument("--seed", type=int, default=0, help="overlay / pipeline seed")
    parser.add_argument(
        "--areas", default="compute,memory", help="comma-separated area types"
    )
    parser.add_argument("--out", type=Path, help="write JSON here instead of stdout")


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        print(text)
    else:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text + "\n")


def _cmd_simulate(args: argparse.Namespace) -> int:
    config = _load_config(args)
    if args.timing_only:
        timing_path, summary_path = timing_report(config)
    else:
        timing_path, summary_path = run_experiment(config)
    log.info("wrote %s and %s", timing_path, summary_path)
    return 0


def _cmd_timing(args: argparse.Namespace) -> int:
    config = _load_config(args)
    timing_path, summary_path = timing_report(config)
    log.info("wrote %s and %s", timing_path, summary_path)
    return 0


def _pipeline_for(args: argparse.Namespace):
    from .decision import AreaType

    areas = _parse_csv_list(args.areas, AreaType)
    overlay = build_overlay(args.n, args.seed)
    k = getattr(args, "k", None) or 2
    bandwidth = getattr(args, "bandwidth", None)
    return run_smartfog_pipeline(overlay, areas, k, bandwidth, args.seed)


def _cmd_cluster(args: argparse.Namespace) -> int:
    _, functional_areas, _, _ = _pipeline_for(args)
    _emit(areas_to_json(functional_areas), args.out)
    return 0


def _cmd_select(args: argparse.Namespace) -> int:
    assignment, _, _, _ = _pipeline_for(args)
    _emit(json.dumps(assignment.to_json_obj(), sort_keys=True, separators=(",", ":")), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="smartfog",
        description="Fog overlay experiments: gateway selection, clustering, simulation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run the full size x mode x replication sweep")
    _add_sweep_flags(sim)
    sim.add_argument(
        "--timing-only", action="store_true", help="benchmark pipeline stages instead"
    )
    sim.set_defaults(func=_cmd_simulate)

    tim = sub.add_parser("timing", help="benchmark pipeline stages per overlay size")
    _add_sweep_flags(tim, with_modes=False)
    tim.set_defaults(func=_cmd_timing)

    clu = sub.add_parser("cluster", help="emit functional areas for one overlay")
    _add_single_overlay_flags(clu)
    clu.add_argument("--k", type=int, default=2, help="clusters per gateway run")
    clu.add_argument("--bandwidth", type=float, help="Gaussian bandwidth (default: median heuristic)")
    clu.set_defaults(func=_cmd_cluster)

    sel = sub.add_parser("select", help="emit the gateway assignment for one overlay")
    _add_single_overlay_flags(sel)
    sel.set_defaults(func=_cmd_select)

    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SmartFogError as exc:
        log.error("%s", exc)
        return 2


if __name__ == "__main__":
    sys.exit(main())
