#!/usr/bin/env python3
"""Dense-vs-structured solver benchmark sweep.

Writes one CSV row per problem size comparing the dense Gram-factorization
oracle against the banded-plus-border structured solver.  The two solutions
are cross-checked (max coefficient difference) on every row.

Usage:
    python scripts/run_benchmarks.py --sizes 64,256,1024,2048 --repeats 3
    python scripts/run_benchmarks.py --symbol "1;(1,1,1);(1,1,2)" --sizes 64,256
"""

import argparse
import sys

from hbortho import bench_solvers, parse_symbol


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--symbol",
        default="0;(1,1,1)",
        help='symbol text (default: the unit simple pole "0;(1,1,1)")',
    )
    parser.add_argument("--sizes", default="64,256,1024,2048")
    parser.add_argument("--repeats", type=int, default=3)
    parser.add_argument("--output", default=None, help="CSV path (default stdout)")
    args = parser.parse_args(argv)

    phi = parse_symbol(args.symbol)
    sizes = [int(s) for s in args.sizes.split(",") if s]
    records = bench_solvers(phi, sizes, repeats=args.repeats)

    lines = [
        "n,dense_seconds,structured_seconds,speedup,"
        "max_coeff_diff,dense_residual,structured_residual"
    ]
    for r in records:
        lines.append(
            f"{r['n']},{r['dense_seconds']!r},{r['structured_seconds']!r},"
            f"{r['speedup']!r},{r['max_coeff_diff']!r},"
            f"{r['dense_residual']!r},{r['structured_residual']!r}"
        )
    text = "\n".join(lines) + "\n"
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
