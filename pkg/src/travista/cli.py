"""Operator CLI: ingest documents, serve the API, run benchmarks, report.

Exit codes: 0 success, 1 runtime error, 2 usage error.

    travista ingest <paths...> [--skip-duplicates] [--data-dir DIR]
    travista serve [--port N] [--data-dir DIR] [--max-body-mb N]
    travista bench [--spec file.json | --workload NAME] --copies 1,2,4,8
                   --iters 1000 --out bench.csv [--overlap-copies]
    travista report <trace-id> [--bins 30] [--threshold 0.8]
                    [--rarity-cutoff 0.1] [--data-dir DIR]
"""

from __future__ import annotations

import argparse
import os
import statistics
import sys
from bisect import bisect_right
from pathlib import Path

from . import aggregation, workloads
from .bench import (
    WorkloadSpec,
    linear_fit,
    run_scaling_bench,
)
from .errors import DuplicateTrace, TraceNotFound, TravistaError
from .model import parse_trace
from .store import StoreSnapshot, TraceStore

DEFAULT_DATA_DIR = "./travista-data"

_WORKLOADS = {
    "default": workloads.default_workload,
    "light": workloads.light_workload,
    "stress": workloads.contention_stress_workload,
    "diagnosis": workloads.diagnosis_workload,
}


def _data_dir(value: str | None) -> Path:
    return Path(value or os.environ.get("TRAVISTA_DATA") or DEFAULT_DATA_DIR)


def _iter_documents(paths: list[str]):
    for raw in paths:
        path = Path(raw)
        if path.is_dir():
            yield from sorted(path.rglob("*.json"))
        else:
            yield path


def cmd_ingest(args) -> int:
    store = TraceStore(_data_dir(args.data_dir))
    files_read = 0
    accepted = 0
    duplicates = 0
    rejected: list[tuple[Path, list[str]]] = []
    preprocessing: list[float] = []
    try:
        for path in _iter_documents(args.paths):
            try:
                raw = path.read_bytes()
            except OSError as exc:
                print(f"error: cannot read {path}: {exc}", file=sys.stderr)
                return 1
            files_read += 1
            trace, report = parse_trace(raw)
            if trace is None:
                rejected.append((path, sorted({code for code, _ in report.errors})))
                continue
            try:
                receipt = store.ingest(trace)
            except DuplicateTrace:
                duplicates += 1
                continue
            accepted += 1
            preprocessing.append(receipt.preprocessing_us)
    finally:
        store.close()

    mean_us = statistics.mean(preprocessing) if preprocessing else 0.0
    print(
        f"files: {files_read}  accepted: {accepted}  rejected: {len(rejected)}  "
        f"duplicates: {duplicates}  mean preprocessing: {mean_us:.0f} us"
    )
    for path, codes in rejected:
        print(f"  rejected {path}: {','.join(codes)}")
    if rejected:
        return 1
    if duplicates and not args.skip_duplicates:
        return 1
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .api import create_app

    port = args.port if args.port is not None else int(
        os.environ.get("TRAVISTA_PORT", "8714")
    )
    store = TraceStore(_data_dir(args.data_dir))
    app = create_app(store, max_body_mb=args.max_body_mb, ui_origin=args.ui_origin)
    try:
        uvicorn.run(app, host=args.host, port=port, log_level="warning")
    except (OSError, SystemExit) as exc:
        print(f"error: cannot serve on port {port}: {exc}", file=sys.stderr)
        return 1
    finally:
        store.close()
    return 0


def cmd_bench(args) -> int:
    if args.spec:
        spec = WorkloadSpec.from_file(args.spec)
    else:
        spec = _WORKLOADS[args.workload]()
    try:
        copies = [int(part) for part in args.copies.split(",") if part]
    except ValueError:
        print(f"error: bad --copies list {args.copies!r}", file=sys.stderr)
        return 2
    try:
        result = run_scaling_bench(
            spec,
            copies,
            iterations=args.iters,
            data_dir=args.data_dir,
            overlap=args.overlap_copies,
        )
    except (ValueError, TravistaError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    result.write_csv(args.out)
    print(f"wrote {len(result.rows)} rows to {args.out}")
    print(f"{'category':<12}{'db_traces':>10}{'median_us':>14}")
    medians = result.medians()
    for (db_traces, category), value in sorted(medians.items(), key=lambda kv: (kv[0][1], kv[0][0])):
        print(f"{category:<12}{db_traces:>10}{value:>14.1f}")
    if len(copies) >= 2:
        print(f"{'category':<12}{'slope_us/trace':>16}{'r2':>8}")
        for category in ("raw_trace", "event", "edge", "contention"):
            xs, ys = result.category_series(category)
            fit = linear_fit(xs, ys)
            print(f"{category:<12}{fit.slope:>16.4f}{fit.r2:>8.3f}")
    return 0


# -- report -------------------------------------------------------------------


def _percentile(snapshot: StoreSnapshot, task_type: str, focal: int) -> float:
    samples = sorted(snapshot.latency_samples(task_type))
    return bisect_right(samples, focal) / len(samples)


def _type_median(snapshot: StoreSnapshot, task_type: str) -> float:
    return statistics.median(snapshot.latency_samples(task_type))


def render_report(
    snapshot: StoreSnapshot,
    trace_id: str,
    bins: int,
    threshold: float,
    rarity_cutoff: float,
    outlier_percentile: float = 0.95,
    outlier_ratio: float = 1.5,
) -> str:
    """Plain-text diagnosis for one trace against the whole store.

    A task is a latency outlier when it sits at or above the percentile
    cutoff AND runs at least ``outlier_ratio`` times its type median; the
    ratio guard keeps tiny distributions (a lone sample is trivially at
    percentile 1.0) out of the section.  Contention windows require raw
    concurrency >= 2: a bucket occupied only by the trace itself scales to
    1.0 but is not contention.  The outlier section ranks by percentile then
    ratio; every other section follows Gantt lane order.
    """
    payload, _ = snapshot.load_trace_aggregates(
        trace_id, bins=bins, threshold=threshold, rarity_cutoff=rarity_cutoff
    )
    trace = payload.trace
    tasks_by_id = trace.tasks_by_id
    lane_tasks = [tasks_by_id[task_id] for task_id in payload.lane_order]
    lane_number = {task_id: i + 1 for i, task_id in enumerate(payload.lane_order)}
    histograms = dict(zip(payload.lane_order, payload.histograms))

    lines: list[str] = []
    summary = snapshot.summary(trace_id)
    lines.append(f"trace {trace_id}  root {summary.root_type}")
    lines.append(
        f"  span {trace.start_ts} .. {trace.end_ts} us"
        f"  duration {trace.duration_us / 1000:.2f} ms"
        f"  tasks {len(trace.tasks)}  events {len(trace.events)}"
    )
    lines.append(
        f"  params bins={bins} threshold={threshold:.2f} rarity_cutoff={rarity_cutoff:.2f}"
    )
    lines.append("")

    ranked = []
    for task in lane_tasks:
        percentile = _percentile(snapshot, task.task_type, task.duration_us)
        hist = histograms[task.task_id]
        ratio = task.duration_us / max(1.0, _type_median(snapshot, task.task_type))
        at_top = percentile >= outlier_percentile and ratio >= outlier_ratio
        if at_top or hist.highlight_out_of_range:
            ranked.append((percentile, ratio, task, hist))
    ranked.sort(key=lambda item: (-item[0], -item[1]))
    lines.append(f"task latency outliers (percentile >= {outlier_percentile:.2f}):")
    if not ranked:
        lines.append("  (none)")
    for rank, (percentile, ratio, task, hist) in enumerate(ranked, start=1):
        flag = "  OUT-OF-RANGE" if hist.highlight_out_of_range else ""
        lines.append(
            f"  {rank}. {task.task_type} [{task.task_id}]"
            f"  duration {task.duration_us / 1000:.2f} ms"
            f"  percentile {percentile:.3f}"
            f"  {ratio:.1f}x type median"
            f"  bin {hist.highlight_bin + 1}/{len(hist.counts)}{flag}"
        )
    lines.append("")

    lines.append(f"rare events (frequency < {rarity_cutoff:.2f}):")
    rare_events = [
        (event, rarity)
        for event in trace.events
        for rarity, outlier in [payload.event_rarities[event.event_id]]
        if outlier
    ]
    rare_events.sort(key=lambda pair: (lane_number[pair[0].task_id], pair[0].timestamp))
    if not rare_events:
        lines.append("  (none)")
    for event, rarity in rare_events:
        lines.append(
            f"  - [{event.task_id}] {rarity.task_type}"
            f'  "{rarity.label}"'
            f"  frequency {rarity.frequency:.3f}"
            f" ({rarity.occurrence_count}/{rarity.instance_count})"
        )
    lines.append("")

    lines.append(f"rare invocation edges (frequency < {rarity_cutoff:.2f}):")
    rare_edges = [
        (index, frequency)
        for index, (frequency, outlier) in sorted(payload.edge_frequencies.items())
        if outlier
    ]
    if not rare_edges:
        lines.append("  (none)")
    seen_pairs = set()
    for index, frequency in rare_edges:
        pair = (frequency.parent_type, frequency.child_type)
        if pair in seen_pairs:
            continue
        seen_pairs.add(pair)
        lines.append(
            f"  - {frequency.parent_type} -> {frequency.child_type}"
            f"  frequency {frequency.frequency:.3f}"
            f" ({frequency.count}/{snapshot.instance_count(frequency.parent_type)})"
        )
    lines.append("")

    lines.append(f"contention over threshold (scaled > {threshold:.2f}):")
    any_window = False
    for task in lane_tasks:
        timeline = payload.contention[task.task_id]
        flagged = sum(
            1
            for flag, raw in zip(timeline.threshold_flags, timeline.raw_counts)
            if flag and raw >= 2
        )
        if flagged:
            any_window = True
            lines.append(
                f"  - [{task.task_id}] {task.task_type} on {task.process_id}:"
                f" {flagged} of {len(timeline.raw_counts)} buckets over threshold,"
                f" peak {max(timeline.raw_counts)} concurrent traces"
            )
    if not any_window:
        lines.append("  (none)")
    lines.append("")

    lines.append("lanes (top to bottom):")
    for task in lane_tasks:
        percentile = _percentile(snapshot, task.task_type, task.duration_us)
        n_events = sum(1 for e in trace.events if e.task_id == task.task_id)
        offset_ms = (task.start_ts - trace.start_ts) / 1000
        lines.append(
            f"  {lane_number[task.task_id]}. {task.task_type} [{task.task_id}]"
            f"  +{offset_ms:.2f} ms"
            f"  duration {task.duration_us / 1000:.2f} ms"
            f"  p{percentile:.2f}  events {n_events}"
        )
    return "\n".join(lines) + "\n"


def cmd_report(args) -> int:
    store = TraceStore(_data_dir(args.data_dir))
    try:
        snapshot = store.snapshot()
        text = render_report(
            snapshot,
            args.trace_id,
            bins=args.bins,
            threshold=args.threshold,
            rarity_cutoff=args.rarity_cutoff,
        )
    except TraceNotFound as exc:
        print(f"error: {exc.message}", file=sys.stderr)
        return 1
    finally:
        store.close()
    print(text, end="")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="travista")
    sub = parser.add_subparsers(dest="command", required=True)

    p_ingest = sub.add_parser("ingest", help="ingest interchange documents")
    p_ingest.add_argument("paths", nargs="+", help="files or directories of .json documents")
    p_ingest.add_argument("--skip-duplicates", action="store_true")
    p_ingest.add_argument("--data-dir")
    p_ingest.set_defaults(func=cmd_ingest)

    p_serve = sub.add_parser("serve", help="run the HTTP API")
    p_serve.add_argument("--port", type=int, default=None)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--data-dir")
    p_serve.add_argument("--max-body-mb", type=int, default=64)
    p_serve.add_argument("--ui-origin", default="*")
    p_serve.set_defaults(func=cmd_serve)

    p_bench = sub.add_parser("bench", help="run the scaling benchmark")
    p_bench.add_argument("--spec", help="workload spec JSON file")
    p_bench.add_argument(
        "--workload", choices=sorted(_WORKLOADS), default="default",
        help="built-in workload when --spec is not given",
    )
    p_bench.add_argument("--copies", default="1,2,4,8")
    p_bench.add_argument("--iters", type=int, default=1000)
    p_bench.add_argument("--out", default="bench.csv")
    p_bench.add_argument("--overlap-copies", action="store_true")
    p_bench.add_argument("--data-dir", help="keep per-factor stores here instead of a temp dir")
    p_bench.set_defaults(func=cmd_bench)

    p_report = sub.add_parser("report", help="plain-text diagnosis for one trace")
    p_report.add_argument("trace_id")
    p_report.add_argument("--bins", type=int, default=aggregation.DEFAULT_BINS)
    p_report.add_argument("--threshold", type=float, default=aggregation.DEFAULT_THRESHOLD)
    p_report.add_argument("--rarity-cutoff", type=float, default=aggregation.DEFAULT_RARITY_CUTOFF)
    p_report.add_argument("--data-dir")
    p_report.set_defaults(func=cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except TravistaError as exc:
        print(f"error: {exc.code}: {exc.message}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
