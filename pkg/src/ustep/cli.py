"""Command-line front end: parse, bench, sweep, and stats workflows."""

import argparse
import csv
import io
import json
import sys
import time

from .evaluation import (
    DatasetFormatError,
    grouping_accuracy,
    load_labeled_dataset,
    run_miner,
    sweep,
    write_timing_csv,
)
from .miner import Miner, MinerConfig, SnapshotError
from .tokens import ConfigError

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_SNAPSHOT = 3


def _read_mask_rules(path):
    """One regex per line; '#' starts a comment; applied in file order."""
    rules = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line and not line.startswith("#"):
                rules.append(line)
    return rules


def _read_grid(path):
    """CSV-ish grid file of sigma,phi pairs; '#' comments allowed."""
    grid = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = [p.strip() for p in line.replace(";", ",").split(",")]
            if parts == ["sigma", "phi"]:
                continue
            if len(parts) != 2:
                raise ValueError(f"bad grid line: {line!r}")
            grid.append((float(parts[0]), int(parts[1])))
    return grid


def _open_input(path):
    if path == "-":
        return sys.stdin
    return open(path, encoding="utf-8", errors="replace")


def _build_config(args):
    rules = _read_mask_rules(args.masks) if args.masks else []
    return MinerConfig(sigma=args.sigma, phi=args.phi, mask_rules=rules,
                       strict_wildcard_sim=args.strict_sim)


def _load_miner(args):
    if args.snapshot_in:
        with open(args.snapshot_in, "rb") as fh:
            return Miner.restore(fh.read())
    return Miner(_build_config(args))


def _maybe_write_snapshot(miner, args):
    if args.snapshot_out:
        with open(args.snapshot_out, "wb") as fh:
            fh.write(miner.snapshot())


def cmd_parse(args):
    miner = _load_miner(args)
    start = time.perf_counter()
    n = 0
    with _open_input(args.input) as fh:
        for line in fh:
            result = miner.process_message(line.rstrip("\r\n"))
            n += 1
            print(json.dumps({
                "line_no": n,
                "template_id": result.template_id,
                "template": result.template_text,
                "variables": result.variables,
                "created_new": result.created_new,
            }, separators=(",", ":")))
    _maybe_write_snapshot(miner, args)
    elapsed = time.perf_counter() - start
    print(f"parsed {n} messages | {miner.stats.template_count} templates | "
          f"{miner.stats.node_count} nodes | {elapsed:.3f}s", file=sys.stderr)
    return EXIT_OK


def cmd_bench(args):
    records = load_labeled_dataset(args.input)
    cfg = _build_config(args)
    lines = [r.content for r in records]
    predicted, timing, miner = run_miner(cfg, lines, args.chunk_size,
                                         dataset_name=args.input)
    grouping = grouping_accuracy(records, predicted, dataset_name=args.input)
    _maybe_write_snapshot(miner, args)
    if args.timing_csv:
        with open(args.timing_csv, "w", newline="", encoding="utf-8") as fh:
            write_timing_csv(timing, fh)
    if args.format == "csv":
        write_timing_csv(timing, sys.stdout)
        print(f"parsing_accuracy={grouping.parsing_accuracy:.6f}",
              file=sys.stderr)
    else:
        print(json.dumps({
            "grouping": grouping.as_dict(),
            "throughput": timing.as_dict(),
        }, indent=2))
    return EXIT_OK


def cmd_sweep(args):
    records = load_labeled_dataset(args.input)
    grid = _read_grid(args.grid)
    if not grid:
        print("error: empty hyperparameter grid", file=sys.stderr)
        return EXIT_USAGE
    rules = _read_mask_rules(args.masks) if args.masks else []
    best, results = sweep(records, grid, mask_rules=rules,
                          strict=args.strict_sim,
                          chunk_size=args.chunk_size,
                          dataset_name=args.input)
    if args.format == "csv":
        writer = csv.writer(sys.stdout)
        writer.writerow(["sigma", "phi", "parsing_accuracy"])
        for res in results:
            writer.writerow([res["sigma"], res["phi"],
                             f"{res['parsing_accuracy']:.6f}"])
        print(f"best: sigma={best['sigma']} phi={best['phi']} "
              f"pa={best['parsing_accuracy']:.6f}", file=sys.stderr)
    else:
        print(json.dumps({"best": best, "results": results}, indent=2))
    return EXIT_OK


def cmd_stats(args):
    with open(args.snapshot_in, "rb") as fh:
        miner = Miner.restore(fh.read())
    print(json.dumps({
        "stats": miner.stats.as_dict(),
        "templates": [
            {"id": tid, "template": text, "match_count": count}
            for tid, text, count in miner.templates()
        ],
    }, indent=2))
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="ustep",
        description="Streaming log template miner and evaluation harness.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_miner_flags(p):
        p.add_argument("--sigma", type=float, default=0.5,
                       help="similarity threshold in [0,1] (default 0.5)")
        p.add_argument("--phi", type=int, default=8,
                       help="leaf capacity before splitting (default 8)")
        p.add_argument("--strict-sim", dest="strict_sim", action="store_true",
                       help="template wildcards only match masked tokens")
        p.add_argument("--masks", help="mask-rules file, one regex per line")

    p = sub.add_parser("parse", help="structure raw lines to JSON results")
    add_miner_flags(p)
    p.add_argument("--input", default="-", help="raw line file or - for stdin")
    p.add_argument("--snapshot-in", help="resume from a snapshot file")
    p.add_argument("--snapshot-out", help="write miner state on exit")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("bench", help="score a labeled CSV corpus")
    add_miner_flags(p)
    p.add_argument("--input", required=True, help="labeled structured CSV")
    p.add_argument("--chunk-size", type=int, default=1000)
    p.add_argument("--timing-csv", help="write per-chunk timings here")
    p.add_argument("--snapshot-out", help="write miner state on exit")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.set_defaults(func=cmd_bench, snapshot_in=None)

    p = sub.add_parser("sweep", help="grid-search sigma/phi over a corpus")
    p.add_argument("--input", required=True, help="labeled structured CSV")
    p.add_argument("--grid", required=True,
                   help="grid file of sigma,phi pairs")
    p.add_argument("--masks", help="mask-rules file, one regex per line")
    p.add_argument("--strict-sim", dest="strict_sim", action="store_true")
    p.add_argument("--chunk-size", type=int, default=1000)
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("stats", help="inspect a snapshot file")
    p.add_argument("--snapshot-in", required=True)
    p.set_defaults(func=cmd_stats)

    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (ConfigError, DatasetFormatError, ValueError) as exc:
        if isinstance(exc, SnapshotError):
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_SNAPSHOT
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
