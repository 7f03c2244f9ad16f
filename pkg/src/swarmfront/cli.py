"""Command-line harness for instances, campaigns, metrics, and comparisons.

Exit codes: 0 on success, 1 on runtime failure, 2 on usage or
configuration errors. The output directory for `run` is resolved as
CLI flag, then config output_dir, then the SWARMFRONT_OUT environment
variable, then ./swarmfront-results.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .campaign import compare_campaign, load_campaign_config, run_campaign, write_metrics
from .errors import ConfigurationError, InstanceFormatError
from .gvrp import generate_instance, write_instance

__all__ = ["build_parser", "main", "entry_point"]

DEFAULT_OUTPUT_DIR = "swarmfront-results"
OUTPUT_DIR_ENV = "SWARMFRONT_OUT"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="swarmfront",
        description="Seeded multi-objective optimization benchmarks on chain routing instances.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    gen = commands.add_parser(
        "gen-instance", help="generate a reproducible routing instance file"
    )
    gen.add_argument("--d-total", type=int, default=1001, help="number of chain segments")
    gen.add_argument("--n-stops", type=int, default=9, help="number of intermediate stops")
    gen.add_argument("--capacity", type=float, default=200.0, help="vehicle capacity")
    gen.add_argument("--v-min", type=float, default=1.0, help="minimum leg speed")
    gen.add_argument("--v-max", type=float, default=100.0, help="maximum leg speed")
    gen.add_argument("--seed", type=int, default=0, help="generator seed")
    gen.add_argument("--out", required=True, help="instance file to write")

    run = commands.add_parser("run", help="execute a campaign described by a config file")
    run.add_argument("config", help="campaign config JSON file")
    run.add_argument("--out", default=None, help="result directory")

    metrics = commands.add_parser(
        "metrics", help="compute hypervolume/convergence CSV reports for a result directory"
    )
    metrics.add_argument("results", help="campaign result directory")

    compare = commands.add_parser(
        "compare", help="summarize final-iteration differences between algorithms"
    )
    compare.add_argument("results", help="campaign result directory")
    return parser


def _cmd_gen_instance(args) -> int:
    instance = generate_instance(
        seed=args.seed,
        d_total=args.d_total,
        n_stops=args.n_stops,
        capacity=args.capacity,
        v_min=args.v_min,
        v_max=args.v_max,
    )
    write_instance(instance, args.out)
    print(
        f"wrote {args.out}: D={instance.d_total} N={instance.n_stops} "
        f"Q={instance.capacity} v=[{instance.v_min}, {instance.v_max}] seed={args.seed}"
    )
    return 0


def _cmd_run(args) -> int:
    config = load_campaign_config(args.config)
    out_dir = args.out
    if out_dir is None and config.output_dir is not None:
        configured = Path(config.output_dir)
        if not configured.is_absolute():
            configured = Path(args.config).parent / configured
        out_dir = str(configured)
    if out_dir is None:
        out_dir = os.environ.get(OUTPUT_DIR_ENV) or DEFAULT_OUTPUT_DIR
    manifest = run_campaign(config, out_dir)
    for block in manifest["algorithms"]:
        print(
            f"{block['label']}: {manifest['runs']} runs x {manifest['max_iterations']} "
            f"iterations ({block['evaluations_per_iteration']} evaluations/iteration)"
        )
    failures = [s for s in manifest["run_status"] if s["status"] != "completed"]
    print(f"results written to {out_dir}")
    if failures:
        for status in failures:
            print(
                f"failed: {status['algorithm']} run {status['run']} "
                f"(seed {status['seed']}): {status['error']}",
                file=sys.stderr,
            )
        return 1
    return 0


def _cmd_metrics(args) -> int:
    for path in write_metrics(args.results):
        print(f"wrote {path}")
    return 0


def _cmd_compare(args) -> int:
    text, _ = compare_campaign(args.results)
    print(text)
    print(f"wrote {Path(args.results) / 'compare.json'}")
    return 0


_HANDLERS = {
    "gen-instance": _cmd_gen_instance,
    "run": _cmd_run,
    "metrics": _cmd_metrics,
    "compare": _cmd_compare,
}


def main(argv=None) -> int:
    """Parse arguments, dispatch, and translate exceptions to exit codes."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _HANDLERS[args.command](args)
    except (ConfigurationError, InstanceFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry_point() -> None:
    raise SystemExit(main(sys.argv[1:]))
