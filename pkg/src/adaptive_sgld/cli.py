"""Command-line entry point: ``adaptive-sgld {run,compare,ingest-landsat,list-presets}``.

Exit codes: 0 success, 1 a chain diverged, 2 configuration error, 3 I/O error.
"""

import argparse
import json
import logging
import sys
from pathlib import Path

from .config import list_presets, load_config
from .core import ConfigurationError
from .data import DatasetError, ingest_landsat
from .experiments import compare, run_experiment

EXIT_OK, EXIT_DIVERGED, EXIT_CONFIG, EXIT_IO = 0, 1, 2, 3


def _seed_list(text):
    try:
        seeds = [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"seeds must be comma-separated integers, got {text!r}") from None
    if not seeds:
        raise argparse.ArgumentTypeError("empty seed list")
    return seeds


def build_parser():
    p = argparse.ArgumentParser(prog="adaptive-sgld", description="Adaptive-drift SGLD experiments.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run one experiment config for every seed")
    r.add_argument("--config", required=True, help="JSON config file or preset name")
    r.add_argument("--seeds", type=_seed_list, help="comma-separated seeds, overriding the config")
    r.add_argument("--out", help="output directory (default runs/<name>)")
    r.add_argument("--workers", type=int, default=1, help="parallel seed workers")

    c = sub.add_parser("compare", help="tabulate finished runs or configs side by side")
    c.add_argument("--configs", nargs="+", required=True,
                   help="summary.json files, run directories, or configs/presets to run first")
    c.add_argument("--out", required=True)
    c.add_argument("--seeds", type=_seed_list)

    i = sub.add_parser("ingest-landsat", help="validate and install the Statlog Landsat files")
    i.add_argument("--train", required=True)
    i.add_argument("--test", required=True)
    i.add_argument("--out", required=True)

    sub.add_parser("list-presets", help="print the shipped preset names")
    return p


def _load_summary_or_run(spec, out_root, seeds):
    path = Path(spec)
    if path.is_dir() and (path / "summary.json").is_file():
        path = path / "summary.json"
    if path.is_file() and path.name == "summary.json":
        return json.loads(path.read_text())
    config = load_config(spec)
    return run_experiment(config, seeds=seeds, out_dir=Path(out_root) / config.name)


def _cmd_run(args):
    config = load_config(args.config)
    summary = run_experiment(config, seeds=args.seeds, out_dir=args.out, workers=args.workers)
    for r in summary["seeds"]:
        extra = {k: r[k] for k in ("posterior_mean", "cov_error", "min_mode_coverage", "test_accuracy") if k in r}
        flag = " DIVERGED" if r["diverged"] else ""
        print(f"seed {r['seed']}: {r['n_samples']} samples, {r['wall_clock_seconds']:.1f}s {extra}{flag}")
    return EXIT_DIVERGED if summary["any_diverged"] else EXIT_OK


def _cmd_compare(args):
    summaries = [_load_summary_or_run(s, args.out, args.seeds) for s in args.configs]
    rows = compare(summaries, args.out)
    for row in rows:
        print(json.dumps(row))
    return EXIT_DIVERGED if any(r["diverged_seeds"] for r in rows) else EXIT_OK


def _cmd_ingest(args):
    info = ingest_landsat(args.train, args.test, args.out)
    print(json.dumps(info, indent=2))
    return EXIT_OK


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "compare":
            return _cmd_compare(args)
        if args.command == "ingest-landsat":
            return _cmd_ingest(args)
        if args.command == "list-presets":
            for name in list_presets():
                print(name)
            return EXIT_OK
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, DatasetError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
