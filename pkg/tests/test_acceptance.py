"""Acceptance criteria, one test per criterion.

Each test prints ``ACCEPTANCE <name>: PASS|FAIL`` (visible with ``pytest -s``
or ``-rA``).  Tolerances are pinned here: table equivalence, replication
scaling, contention counting, and histogram conservation are exact; the
scaling trend requires R^2 >= 0.9 on event/edge/contention medians; the
dominance and preprocessing checks are property bounds, not numeric matches.
"""

from __future__ import annotations

import json
import random
import subprocess
import sys
from collections import defaultdict
from contextlib import contextmanager
from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from travista.aggregation import build_histogram, contention_timelines, extract_features
from travista.bench import generate_corpus, linear_fit, replicate_corpus, run_breakdown_bench, run_scaling_bench
from travista.model import parse_trace
from travista.store import TraceStore
from travista.workloads import (
    contention_stress_workload,
    default_workload,
    diagnosis_workload,
    light_workload,
)

from conftest import FakeView, make_doc, make_task


@contextmanager
def criterion(name):
    try:
        yield
    except BaseException:
        print(f"ACCEPTANCE {name}: FAIL")
        raise
    print(f"ACCEPTANCE {name}: PASS")


def _batch_recompute_canonical(traces) -> bytes:
    """Independent batch oracle: fold extract_features over the trace set
    and emit the canonical table encoding directly."""
    counters = {"traces": 0, "tasks": 0, "events": 0}
    samples = defaultdict(list)
    event_rows = defaultdict(list)
    edge_rows = defaultdict(list)
    activity = defaultdict(list)
    for trace in traces:
        counters["traces"] += 1
        counters["tasks"] += len(trace.tasks)
        counters["events"] += len(trace.events)
        features = extract_features(trace)
        for task_type, values in features.latency_samples.items():
            samples[task_type].extend(values)
        for task_type, labels in features.event_occurrences.items():
            for label, task_ids in labels.items():
                event_rows[task_type].extend([label, task_id] for task_id in task_ids)
        for parent, children in features.invocation_pairs.items():
            for child, parent_ids in children.items():
                edge_rows[parent].extend([child, parent_id] for parent_id in parent_ids)
        for process, intervals in features.activity_intervals.items():
            activity[process].extend([s, e, tid] for s, e, tid in intervals)
    state = {
        "counters": dict(sorted(counters.items())),
        "types": {
            t: {"count": len(samples[t]), "samples": sorted(samples[t])}
            for t in sorted(samples)
        },
        "events": {t: sorted(event_rows[t]) for t in sorted(event_rows)},
        "edges": {t: sorted(edge_rows[t]) for t in sorted(edge_rows)},
        "activity": {p: sorted(activity[p]) for p in sorted(activity)},
    }
    return json.dumps(state, sort_keys=True, separators=(",", ":")).encode("utf-8")


def test_incremental_batch_equivalence(tmp_path):
    """1,000 traces, 3 random ingestion orders, byte-identical tables."""
    with criterion("incremental-batch-equivalence"):
        corpus = generate_corpus(light_workload(traces_per_run=1000, seed=404))
        expected = _batch_recompute_canonical(corpus)
        for order in range(3):
            shuffled = corpus[:]
            random.Random(order).shuffle(shuffled)
            store = TraceStore(tmp_path / f"order{order}", checkpoint_every=10**9)
            for trace in shuffled:
                store.ingest(trace)
            assert store.snapshot().canonical_aggregate_bytes() == expected
            store.close()


def _frequency_tables(store):
    state = store.snapshot().canonical_aggregate_state()
    instances = {t: column["count"] for t, column in state["types"].items()}
    event_freq = {}
    for task_type, rows in state["events"].items():
        per_label = defaultdict(int)
        for label, _task_id in rows:
            per_label[label] += 1
        for label, presence in per_label.items():
            event_freq[(task_type, label)] = Fraction(presence, instances[task_type])
    edge_freq = {}
    for parent, rows in state["edges"].items():
        per_child = defaultdict(int)
        for child, _parent_id in rows:
            per_child[child] += 1
        for child, presence in per_child.items():
            edge_freq[(parent, child)] = Fraction(presence, instances[parent])
    return instances, event_freq, edge_freq


def test_replication_invariance(tmp_path):
    """k in {1,2,4}: frequencies exactly unchanged, counts exactly x k."""
    with criterion("replication-invariance"):
        base = generate_corpus(light_workload(traces_per_run=200, seed=808))
        reference = None
        for k in (1, 2, 4):
            store = TraceStore(tmp_path / f"k{k}", checkpoint_every=10**9)
            for trace in replicate_corpus(base, k):
                store.ingest(trace)
            instances, event_freq, edge_freq = _frequency_tables(store)
            snapshot = store.snapshot()
            histograms = {
                t: build_histogram(snapshot.latency_samples(t), 30, task_type=t)
                for t in snapshot.task_types()
            }
            store.close()
            if reference is None:
                reference = (instances, event_freq, edge_freq, histograms)
                continue
            ref_instances, ref_event_freq, ref_edge_freq, ref_histograms = reference
            assert event_freq == ref_event_freq
            assert edge_freq == ref_edge_freq
            assert instances == {t: k * c for t, c in ref_instances.items()}
            for task_type, hist in histograms.items():
                ref = ref_histograms[task_type]
                assert hist.counts == [k * c for c in ref.counts]
                assert hist.total == k * ref.total
                assert hist.bin_edges == ref.bin_edges


def test_contention_brute_force_oracle():
    """200 randomized interval sets, exact per-bucket distinct-trace counts."""
    with criterion("contention-oracle"):
        rng = random.Random(20240)
        for round_no in range(200):
            n_traces = rng.randint(1, 50)
            activity = defaultdict(list)
            traces = []
            for t in range(n_traces):
                tasks = []
                for i in range(rng.randint(1, 20)):
                    start = rng.randrange(0, 60_000)
                    end = start + rng.randrange(0, 12_000)
                    tasks.append(
                        make_task(f"t{i}", start, end, process_id=f"p{rng.randrange(4)}")
                    )
                trace, report = parse_trace(make_doc(trace_id=f"tr{t}", tasks=tasks))
                assert report.ok
                traces.append(trace)
                for task in trace.tasks:
                    activity[task.process_id].append(
                        (task.start_ts, task.end_ts, trace.trace_id)
                    )
            probe = rng.choice(traces)
            view = FakeView(activity=dict(activity))
            timelines = contention_timelines(view, probe, threshold=0.8)
            for task in probe.tasks:
                t0_ms = task.start_ts // 1000
                expected = []
                for bucket in range(t0_ms, task.end_ts // 1000 + 1):
                    window_lo = bucket * 1000
                    window_hi = window_lo + 1000
                    expected.append(
                        len(
                            {
                                tid
                                for s, e, tid in activity[task.process_id]
                                if s < window_hi and e >= window_lo
                            }
                        )
                    )
                assert timelines[task.task_id].raw_counts == expected


@settings(max_examples=300, deadline=None)
@given(
    samples=st.lists(st.integers(min_value=0, max_value=10**9), min_size=1, max_size=200),
    bins=st.integers(min_value=1, max_value=200),
    focal=st.integers(min_value=0, max_value=10**9),
)
def _histogram_property(samples, bins, focal):
    hist = build_histogram(samples, bins=bins, focal=focal)
    assert sum(hist.counts) == hist.total == len(samples)
    i = hist.highlight_bin
    if hist.highlight_out_of_range:
        assert (focal < min(samples) and i == 0) or (
            focal > max(samples) and i == len(hist.counts) - 1
        )
    else:
        if i == len(hist.counts) - 1:
            assert hist.bin_edges[i] <= focal <= hist.bin_edges[i + 1]
        else:
            assert hist.bin_edges[i] <= focal < hist.bin_edges[i + 1]


def test_histogram_conservation_and_highlight():
    with criterion("histogram-conservation-and-highlight"):
        _histogram_property()


def test_scaling_trend(tmp_path):
    """Copy factors {1,2,4,8} on a 500-trace base, 200 iterations:
    event/edge/contention medians fit a line with R^2 >= 0.9."""
    with criterion("scaling-trend"):
        spec = light_workload(traces_per_run=500, seed=11)
        result = run_scaling_bench(spec, [1, 2, 4, 8], iterations=200, data_dir=tmp_path)
        fits = {}
        for category in ("event", "edge", "contention"):
            xs, ys = result.category_series(category)
            assert xs == [500, 1000, 2000, 4000]
            fits[category] = linear_fit(xs, ys)
        print(
            "  scaling fits:",
            {c: f"r2={f.r2:.3f} slope={f.slope:.3f}us/trace" for c, f in fits.items()},
        )
        for category, fit in fits.items():
            assert fit.r2 >= 0.9, (category, fit)
            assert fit.slope > 0, (category, fit)


def test_breakdown_dominance(tmp_path):
    """Overlap-heavy corpus: contention >= every other category median."""
    with criterion("breakdown-dominance"):
        store = TraceStore(tmp_path / "overlap", checkpoint_every=10**9)
        base = generate_corpus(contention_stress_workload(traces_per_run=150))
        for trace in replicate_corpus(base, 4, overlap=True):
            store.ingest(trace)
        medians = run_breakdown_bench(store, iterations=200).medians()
        store.close()
        flat = {category: value for (_, category), value in medians.items()}
        print("  dominance medians:", {c: round(v, 1) for c, v in flat.items()})
        for category in ("raw_trace", "event", "edge"):
            assert flat["contention"] >= flat[category], flat


def test_preprocessing_cost(tmp_path):
    """Mean ingest preprocessing <= 10 ms on corpus-average-size traces."""
    with criterion("preprocessing-cost"):
        corpus = generate_corpus(default_workload(traces_per_run=300, seed=77))
        mean_tasks = sum(len(t.tasks) for t in corpus) / len(corpus)
        mean_events = sum(len(t.events) for t in corpus) / len(corpus)
        assert 5.5 <= mean_tasks <= 9.0, mean_tasks
        assert 80 <= mean_events <= 125, mean_events
        store = TraceStore(tmp_path / "pre", checkpoint_every=10**9)
        total_us = 0.0
        for trace in corpus:
            total_us += store.ingest(trace).preprocessing_us
        store.close()
        mean_us = total_us / len(corpus)
        print(f"  mean preprocessing: {mean_us:.0f} us over {len(corpus)} traces")
        assert mean_us <= 10_000, mean_us


def test_diagnosis_end_to_end(tmp_path):
    """Injected anomalous trace: report ranks it first, flags the rare event,
    reports an over-threshold contention window."""
    with criterion("diagnosis-end-to-end"):
        spec = diagnosis_workload(traces_per_run=400)
        data_dir = tmp_path / "diag"
        store = TraceStore(data_dir)
        for trace in generate_corpus(spec):
            store.ingest(trace)
        store.close()

        injected = spec.anomaly.anomalous_trace
        trace_id = f"{spec.trace_id_prefix}-{injected.index:05d}"
        completed = subprocess.run(
            [
                sys.executable,
                "-m",
                "travista.cli",
                "report",
                trace_id,
                "--data-dir",
                str(data_dir),
            ],
            capture_output=True,
            text=True,
            timeout=120,
        )
        assert completed.returncode == 0, completed.stderr
        out = completed.stdout

        outlier_lines = out.split("task latency outliers")[1].split("\n\n")[0].splitlines()
        assert outlier_lines[1].strip().startswith(f"1. {injected.task_type}")

        rare_section = out.split("rare events")[1].split("\n\n")[0]
        assert injected.rare_event_label in rare_section
        import re

        match = re.search(r"frequency (\d+\.\d+)", rare_section)
        assert match is not None
        assert float(match.group(1)) < 0.1

        contention_section = out.split("contention over threshold")[1].split("\n\n")[0]
        assert "buckets over threshold" in contention_section
        assert "(none)" not in contention_section
