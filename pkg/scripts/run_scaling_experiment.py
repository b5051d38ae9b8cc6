#!/usr/bin/env python3
"""Scaling experiment: per-category load latency vs store size.

Builds stores holding k time-shifted copies of a base corpus, benchmarks the
biggest trace in each, and reports the per-category median latency with a
linear fit.  Use --plot to render the trend chart when matplotlib is around.

    python3 scripts/run_scaling_experiment.py --copies 1,2,4,8 --iters 200 \
        --out scaling.csv --plot scaling.png
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from travista.bench import CATEGORIES, WorkloadSpec, linear_fit, run_scaling_bench
from travista.workloads import contention_stress_workload, default_workload, light_workload

WORKLOADS = {
    "default": default_workload,
    "light": light_workload,
    "stress": contention_stress_workload,
}


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--spec", help="workload spec JSON (overrides --workload)")
    parser.add_argument("--workload", choices=sorted(WORKLOADS), default="light")
    parser.add_argument("--traces", type=int, default=500, help="base corpus size")
    parser.add_argument("--copies", default="1,2,4,8")
    parser.add_argument("--iters", type=int, default=200)
    parser.add_argument("--overlap-copies", action="store_true")
    parser.add_argument("--out", default="scaling.csv")
    parser.add_argument("--plot", help="write a PNG of median latency vs trace count")
    args = parser.parse_args()

    if args.spec:
        spec = WorkloadSpec.from_file(args.spec)
    else:
        spec = WORKLOADS[args.workload](traces_per_run=args.traces)
    factors = [int(part) for part in args.copies.split(",") if part]

    result = run_scaling_bench(spec, factors, iterations=args.iters, overlap=args.overlap_copies)
    result.write_csv(args.out)
    print(f"wrote {len(result.rows)} rows to {args.out}")

    print(f"{'category':<12}{'slope_us/trace':>16}{'intercept_us':>14}{'r2':>8}")
    series = {}
    for category in CATEGORIES:
        xs, ys = result.category_series(category)
        series[category] = (xs, ys)
        fit = linear_fit(xs, ys)
        print(f"{category:<12}{fit.slope:>16.4f}{fit.intercept:>14.1f}{fit.r2:>8.3f}")

    if args.plot:
        try:
            import matplotlib

            matplotlib.use("Agg")
            import matplotlib.pyplot as plt
        except ImportError:
            print("matplotlib not available; skipping plot", file=sys.stderr)
            return 0
        fig, ax = plt.subplots(figsize=(6, 4))
        for category, (xs, ys) in series.items():
            ax.plot(xs, [y / 1000 for y in ys], marker="o", label=category)
        ax.set_xlabel("traces in store")
        ax.set_ylabel("median load latency (ms)")
        ax.legend()
        fig.tight_layout()
        fig.savefig(args.plot, dpi=150)
        print(f"wrote {args.plot}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
