#!/usr/bin/env python3
"""Breakdown experiment: latency distribution per load category.

Ingests an overlap-heavy corpus (time-identical copies stacked onto the same
windows), loads the biggest trace repeatedly, and prints per-category
latency percentiles.  Use --plot for a CDF chart when matplotlib is around.

    python3 scripts/run_breakdown_experiment.py --iters 1000 \
        --out breakdown.csv --plot breakdown.png
"""

from __future__ import annotations

import argparse
import statistics
import sys
import tempfile
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from travista.bench import CATEGORIES, generate_corpus, replicate_corpus, run_breakdown_bench
from travista.store import TraceStore
from travista.workloads import contention_stress_workload


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--traces", type=int, default=150, help="base corpus size")
    parser.add_argument("--copies", type=int, default=4, help="overlapping copies to stack")
    parser.add_argument("--iters", type=int, default=1000)
    parser.add_argument("--out", default="breakdown.csv")
    parser.add_argument("--plot", help="write a CDF PNG per category")
    args = parser.parse_args()

    base = generate_corpus(contention_stress_workload(traces_per_run=args.traces))
    with tempfile.TemporaryDirectory(prefix="travista-breakdown-") as tmp:
        store = TraceStore(Path(tmp) / "store", checkpoint_every=10**9)
        try:
            for trace in replicate_corpus(base, args.copies, overlap=True):
                store.ingest(trace)
            result = run_breakdown_bench(store, iterations=args.iters)
        finally:
            store.close()

    result.write_csv(args.out)
    print(f"wrote {len(result.rows)} rows to {args.out}")

    by_category = {category: [] for category in CATEGORIES}
    for row in result.rows:
        by_category[row.category].append(row.latency_us)
    print(f"{'category':<12}{'p50_us':>10}{'p90_us':>10}{'p99_us':>10}")
    for category, values in by_category.items():
        values.sort()
        quantiles = statistics.quantiles(values, n=100)
        print(
            f"{category:<12}{statistics.median(values):>10.1f}"
            f"{quantiles[89]:>10.1f}{quantiles[98]:>10.1f}"
        )

    if args.plot:
        try:
            import matplotlib

            matplotlib.use("Agg")
            import matplotlib.pyplot as plt
        except ImportError:
            print("matplotlib not available; skipping plot", file=sys.stderr)
            return 0
        fig, ax = plt.subplots(figsize=(6, 4))
        for category, values in by_category.items():
            xs = sorted(values)
            ys = [i / len(xs) for i in range(1, len(xs) + 1)]
            ax.plot([x / 1000 for x in xs], ys, label=category)
        ax.set_xlabel("load latency (ms)")
        ax.set_ylabel("CDF")
        ax.set_xscale("log")
        ax.legend()
        fig.tight_layout()
        fig.savefig(args.plot, dpi=150)
        print(f"wrote {args.plot}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
