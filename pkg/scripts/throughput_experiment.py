#!/usr/bin/env python3
"""Measure processing speed on a large synthetic stream.

Generates lines cyclically from a fixed population of templates and
records per-chunk wall time, writing a CSV with cumulative timings for
speed-curve plots.

Usage: python3 scripts/throughput_experiment.py [--lines N] [--templates K]
           [--chunk-size N] [--out timings.csv]
"""

import argparse
import random
import sys

from ustep.evaluation import throughput_bench, write_timing_csv
from ustep.miner import MinerConfig


def synthetic_stream(n_lines, n_templates, seed=0):
    rng = random.Random(seed)
    pool = []
    for k in range(n_templates):
        length = rng.randrange(5, 13)
        variable = set(rng.sample(range(length), 2))
        tokens = [None if j in variable else f"k{k}p{j}"
                  for j in range(length)]
        for _ in range(5):
            pool.append(" ".join(
                f"u{rng.randrange(40)}" if t is None else t for t in tokens))
    rng.shuffle(pool)
    for i in range(n_lines):
        yield pool[i % len(pool)]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--lines", type=int, default=1_000_000)
    ap.add_argument("--templates", type=int, default=200)
    ap.add_argument("--chunk-size", type=int, default=10_000)
    ap.add_argument("--sigma", type=float, default=0.5)
    ap.add_argument("--phi", type=int, default=8)
    ap.add_argument("--out", default="timings.csv")
    args = ap.parse_args()

    cfg = MinerConfig(sigma=args.sigma, phi=args.phi)
    report = throughput_bench(
        cfg, synthetic_stream(args.lines, args.templates),
        args.chunk_size, dataset_name="synthetic")
    with open(args.out, "w", newline="") as fh:
        write_timing_csv(report, fh)
    rate = report.total_messages / report.total_seconds
    print(f"{report.total_messages} messages in {report.total_seconds:.2f}s "
          f"({rate:,.0f} msg/s); timings written to {args.out}",
          file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
