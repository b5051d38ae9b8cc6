"""Synthetic corpus generation and load-latency benchmarks.

The workload model stands in for a real microservice corpus: a call tree of
service operations with branch probabilities, log-normal per-type latencies,
per-label event emission probabilities, and optional anomaly injectors (a
rare event label, a rare invocation edge, latency outliers, and one fully
injected anomalous trace with a contention burst around it).

Generation is deterministic: the workload's seed fully determines the
corpus, trace by trace, so experiments replay bit-identically.

Benchmarks measure the store's per-category payload load latency
(raw_trace / event / edge / contention) either repeatedly against one store
(breakdown) or across stores holding k replicated copies of a base corpus
(scaling).  Results land in CSV rows ``db_traces,iter,category,latency_us``.
"""

from __future__ import annotations

import csv
import json
import math
import random
import statistics
import tempfile
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Sequence

from .errors import TraceNotFound
from .model import Edge, EdgeKind, EndpointRef, Event, Task, Trace
from .store import TraceStore

CATEGORIES = ("raw_trace", "event", "edge", "contention")
CSV_HEADER = ("db_traces", "iter", "category", "latency_us")

BASE_TS_US = 1_700_000_000_000_000


@dataclass
class EventSpec:
    label: str
    probability: float


@dataclass
class CallSpec:
    child: str
    probability: float


@dataclass
class ServiceSpec:
    task_type: str
    process_id: str
    median_latency_us: int
    latency_sigma: float
    events: list[EventSpec] = field(default_factory=list)
    calls: list[CallSpec] = field(default_factory=list)


@dataclass
class RareEventSpec:
    task_type: str
    label: str
    rate: float


@dataclass
class RareEdgeSpec:
    parent_type: str
    child_type: str
    rate: float


@dataclass
class LatencyOutlierSpec:
    task_type: str
    rate: float
    multiplier: float


@dataclass
class AnomalousTraceSpec:
    """One deterministic fully-injected trace plus a contention burst.

    The trace at ``index`` multiplies the latency of ``task_type`` and
    carries one ``rare_event_label`` event on it; the next ``burst_traces``
    traces are re-timed to overlap it, spiking concurrency on every process
    they share.
    """

    index: int
    task_type: str
    latency_multiplier: float
    rare_event_label: str
    burst_traces: int = 8


@dataclass
class AnomalySpec:
    rare_event: RareEventSpec | None = None
    rare_edge: RareEdgeSpec | None = None
    latency_outlier: LatencyOutlierSpec | None = None
    anomalous_trace: AnomalousTraceSpec | None = None


@dataclass
class WorkloadSpec:
    """Seeded description of a synthetic corpus."""

    root: str
    services: list[ServiceSpec]
    traces_per_run: int = 500
    seed: int = 42
    arrival_gap_us: int = 50_000
    base_ts_us: int = BASE_TS_US
    trace_id_prefix: str = "syn"
    anomaly: AnomalySpec = field(default_factory=AnomalySpec)

    def service_map(self) -> dict[str, ServiceSpec]:
        return {s.task_type: s for s in self.services}

    def validate(self) -> None:
        services = self.service_map()
        if len(services) != len(self.services):
            raise ValueError("duplicate task_type in services")
        if self.root not in services:
            raise ValueError(f"root {self.root!r} is not a defined service")
        for service in self.services:
            for event in service.events:
                if not 0.0 <= event.probability <= 1.0:
                    raise ValueError(f"event probability out of [0,1]: {event}")
            for call in service.calls:
                if call.child not in services:
                    raise ValueError(f"call target {call.child!r} undefined")
                if not 0.0 <= call.probability <= 1.0:
                    raise ValueError(f"call probability out of [0,1]: {call}")
        if self.traces_per_run < 0:
            raise ValueError("traces_per_run must be >= 0")
        anomaly = self.anomaly
        if anomaly.rare_edge and anomaly.rare_edge.child_type not in services:
            raise ValueError("rare_edge child_type must be a defined service")
        for injector in (anomaly.rare_event, anomaly.rare_edge, anomaly.latency_outlier):
            if injector and not 0.0 <= injector.rate <= 1.0:
                raise ValueError(f"injector rate out of [0,1]: {injector}")

    # -- JSON round-trip -------------------------------------------------

    def to_dict(self) -> dict:
        anomaly: dict = {}
        if self.anomaly.rare_event:
            anomaly["rare_event"] = vars(self.anomaly.rare_event)
        if self.anomaly.rare_edge:
            anomaly["rare_edge"] = vars(self.anomaly.rare_edge)
        if self.anomaly.latency_outlier:
            anomaly["latency_outlier"] = vars(self.anomaly.latency_outlier)
        if self.anomaly.anomalous_trace:
            anomaly["anomalous_trace"] = vars(self.anomaly.anomalous_trace)
        return {
            "root": self.root,
            "traces_per_run": self.traces_per_run,
            "seed": self.seed,
            "arrival_gap_us": self.arrival_gap_us,
            "base_ts_us": self.base_ts_us,
            "trace_id_prefix": self.trace_id_prefix,
            "services": [
                {
                    "task_type": s.task_type,
                    "process_id": s.process_id,
                    "median_latency_us": s.median_latency_us,
                    "latency_sigma": s.latency_sigma,
                    "events": [vars(e) for e in s.events],
                    "calls": [vars(c) for c in s.calls],
                }
                for s in self.services
            ],
            "anomaly": anomaly,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "WorkloadSpec":
        services = [
            ServiceSpec(
                task_type=s["task_type"],
                process_id=s["process_id"],
                median_latency_us=s["median_latency_us"],
                latency_sigma=s["latency_sigma"],
                events=[EventSpec(**e) for e in s.get("events", [])],
                calls=[CallSpec(**c) for c in s.get("calls", [])],
            )
            for s in data["services"]
        ]
        raw_anomaly = data.get("anomaly") or {}
        anomaly = AnomalySpec(
            rare_event=RareEventSpec(**raw_anomaly["rare_event"])
            if raw_anomaly.get("rare_event")
            else None,
            rare_edge=RareEdgeSpec(**raw_anomaly["rare_edge"])
            if raw_anomaly.get("rare_edge")
            else None,
            latency_outlier=LatencyOutlierSpec(**raw_anomaly["latency_outlier"])
            if raw_anomaly.get("latency_outlier")
            else None,
            anomalous_trace=AnomalousTraceSpec(**raw_anomaly["anomalous_trace"])
            if raw_anomaly.get("anomalous_trace")
            else None,
        )
        spec = cls(
            root=data["root"],
            services=services,
            traces_per_run=data.get("traces_per_run", 500),
            seed=data.get("seed", 42),
            arrival_gap_us=data.get("arrival_gap_us", 50_000),
            base_ts_us=data.get("base_ts_us", BASE_TS_US),
            trace_id_prefix=data.get("trace_id_prefix", "syn"),
            anomaly=anomaly,
        )
        spec.validate()
        return spec

    @classmethod
    def from_file(cls, path: str | Path) -> "WorkloadSpec":
        return cls.from_dict(json.loads(Path(path).read_text()))


# -- corpus generation ---------------------------------------------------------


class _TraceBuilder:
    def __init__(self, trace_id: str):
        self.trace_id = trace_id
        self.tasks: list[Task] = []
        self.events: list[Event] = []
        self.edges: list[Edge] = []

    def next_task_id(self) -> str:
        return f"t{len(self.tasks)}"

    def next_event_id(self) -> str:
        return f"e{len(self.events)}"

    def build(self) -> Trace:
        trace = Trace(
            trace_id=self.trace_id,
            tasks=self.tasks,
            events=self.events,
            edges=self.edges,
        )
        trace.start_ts = min(t.start_ts for t in self.tasks)
        trace.end_ts = max(t.end_ts for t in self.tasks)
        return trace


def _sample_latency(rng: random.Random, service: ServiceSpec) -> int:
    mu = math.log(service.median_latency_us)
    return max(1, int(rng.lognormvariate(mu, service.latency_sigma)))


def _emit_task(
    builder: _TraceBuilder,
    rng: random.Random,
    spec: WorkloadSpec,
    services: dict[str, ServiceSpec],
    service: ServiceSpec,
    start_us: int,
    anomalous: bool,
) -> tuple[str, int]:
    """Generate one task and its subtree; returns (task_id, end_us)."""
    anomaly = spec.anomaly
    self_work = _sample_latency(rng, service)
    if (
        anomaly.latency_outlier
        and service.task_type == anomaly.latency_outlier.task_type
        and rng.random() < anomaly.latency_outlier.rate
    ):
        self_work = int(self_work * anomaly.latency_outlier.multiplier)

    task_id = builder.next_task_id()
    # reserve the slot so children number after their parent
    placeholder = Task(
        task_id=task_id,
        task_type=service.task_type,
        process_id=service.process_id,
        start_ts=start_us,
        end_ts=start_us,
    )
    builder.tasks.append(placeholder)

    calls = [c for c in service.calls if rng.random() < c.probability]
    if (
        anomaly.rare_edge
        and service.task_type == anomaly.rare_edge.parent_type
        and rng.random() < anomaly.rare_edge.rate
    ):
        calls.append(CallSpec(child=anomaly.rare_edge.child_type, probability=1.0))

    cursor = start_us + max(1, self_work // (len(calls) + 1)) if calls else start_us
    for call in calls:
        child_service = services[call.child]
        child_id, child_end = _emit_task(
            builder, rng, spec, services, child_service, cursor, anomalous
        )
        builder.edges.append(
            Edge(
                source=EndpointRef("task", task_id),
                target=EndpointRef("task", child_id),
                kind=EdgeKind.INVOCATION,
            )
        )
        cursor = child_end + rng.randint(10, 200)

    end_us = max(start_us + self_work, cursor)
    if (
        anomalous
        and anomaly.anomalous_trace
        and service.task_type == anomaly.anomalous_trace.task_type
    ):
        # the injected slowdown stretches the whole task, children included,
        # so its duration lands at ~multiplier x the type's typical duration
        end_us = start_us + int(
            (end_us - start_us) * anomaly.anomalous_trace.latency_multiplier
        )
    placeholder.end_ts = end_us

    for event_spec in service.events:
        if rng.random() < event_spec.probability:
            builder.events.append(
                Event(
                    event_id=builder.next_event_id(),
                    task_id=task_id,
                    label=event_spec.label,
                    timestamp=rng.randint(start_us, end_us),
                )
            )
    if (
        anomaly.rare_event
        and service.task_type == anomaly.rare_event.task_type
        and rng.random() < anomaly.rare_event.rate
    ):
        builder.events.append(
            Event(
                event_id=builder.next_event_id(),
                task_id=task_id,
                label=anomaly.rare_event.label,
                timestamp=rng.randint(start_us, end_us),
            )
        )
    if (
        anomalous
        and anomaly.anomalous_trace
        and service.task_type == anomaly.anomalous_trace.task_type
    ):
        builder.events.append(
            Event(
                event_id=builder.next_event_id(),
                task_id=task_id,
                label=anomaly.anomalous_trace.rare_event_label,
                timestamp=(start_us + end_us) // 2,
            )
        )
    return task_id, end_us


def generate_trace(spec: WorkloadSpec, index: int, arrival_us: int) -> Trace:
    """Generate trace ``index`` of the corpus at the given arrival time."""
    rng = random.Random(spec.seed * 1_000_003 + index)
    anomalous = (
        spec.anomaly.anomalous_trace is not None
        and index == spec.anomaly.anomalous_trace.index
    )
    builder = _TraceBuilder(f"{spec.trace_id_prefix}-{index:05d}")
    services = spec.service_map()
    _emit_task(builder, rng, spec, services, services[spec.root], arrival_us, anomalous)
    return builder.build()


def _arrivals(spec: WorkloadSpec) -> list[int]:
    rng = random.Random(spec.seed * 7_368_787 + 1)
    arrivals = []
    clock = spec.base_ts_us
    for _ in range(spec.traces_per_run):
        arrivals.append(clock)
        clock += max(1, int(rng.expovariate(1.0 / max(1, spec.arrival_gap_us))))
    injected = spec.anomaly.anomalous_trace
    if injected is not None and injected.index < len(arrivals):
        # re-time the burst window onto the anomalous trace's arrival
        for j in range(1, injected.burst_traces + 1):
            target = injected.index + j
            if target < len(arrivals):
                arrivals[target] = arrivals[injected.index] + rng.randint(0, 500)
    return arrivals


def generate_corpus(spec: WorkloadSpec) -> list[Trace]:
    """Deterministically generate the whole corpus described by ``spec``."""
    spec.validate()
    return [
        generate_trace(spec, i, arrival)
        for i, arrival in enumerate(_arrivals(spec))
    ]


# -- replication ----------------------------------------------------------------


def _shift_rename(trace: Trace, suffix: str, offset_us: int) -> Trace:
    tasks = [
        replace(
            task,
            task_id=f"{task.task_id}{suffix}",
            start_ts=task.start_ts + offset_us,
            end_ts=task.end_ts + offset_us,
            annotations=dict(task.annotations),
        )
        for task in trace.tasks
    ]
    events = [
        Event(
            event_id=f"{event.event_id}{suffix}",
            task_id=f"{event.task_id}{suffix}",
            label=event.label,
            timestamp=event.timestamp + offset_us,
        )
        for event in trace.events
    ]
    edges = [
        Edge(
            source=EndpointRef(edge.source.kind, f"{edge.source.ref_id}{suffix}"),
            target=EndpointRef(edge.target.kind, f"{edge.target.ref_id}{suffix}"),
            kind=edge.kind,
        )
        for edge in trace.edges
    ]
    return Trace(
        trace_id=f"{trace.trace_id}{suffix}",
        tasks=tasks,
        events=events,
        edges=edges,
        start_ts=trace.start_ts + offset_us,
        end_ts=trace.end_ts + offset_us,
    )


def replicate_corpus(corpus: Sequence[Trace], k: int, overlap: bool = False) -> list[Trace]:
    """k id-renamed copies of the corpus.

    Copies occupy disjoint time windows (activity indexes grow without
    inflating per-bucket concurrency) unless ``overlap`` keeps the original
    timestamps, which stacks every copy onto the same windows to stress
    contention queries.  Structure and durations are preserved exactly.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if not corpus:
        return []
    span = max(t.end_ts for t in corpus) - min(t.start_ts for t in corpus) + 1_000_000
    copies = []
    for j in range(k):
        offset = 0 if overlap else j * span
        copies.extend(_shift_rename(trace, f"~c{j}", offset) for trace in corpus)
    return copies


# -- benchmark harness -------------------------------------------------------------


@dataclass
class BenchRow:
    db_traces: int
    iteration: int
    category: str
    latency_us: float


@dataclass
class BenchResult:
    rows: list[BenchRow] = field(default_factory=list)

    def write_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_HEADER)
            for row in self.rows:
                writer.writerow(
                    [row.db_traces, row.iteration, row.category, f"{row.latency_us:.3f}"]
                )

    def medians(self) -> dict[tuple[int, str], float]:
        """Median latency per (db_traces, category)."""
        series: dict[tuple[int, str], list[float]] = {}
        for row in self.rows:
            series.setdefault((row.db_traces, row.category), []).append(row.latency_us)
        return {key: statistics.median(values) for key, values in series.items()}

    def category_series(self, category: str) -> tuple[list[int], list[float]]:
        """(db_traces values ascending, median latency per value)."""
        medians = self.medians()
        counts = sorted({count for count, cat in medians if cat == category})
        return counts, [medians[(count, category)] for count in counts]


@dataclass
class LinearFit:
    slope: float
    intercept: float
    r2: float


def linear_fit(xs: Sequence[float], ys: Sequence[float]) -> LinearFit:
    """Ordinary least squares over (xs, ys) with the coefficient of
    determination; degenerate inputs get r2 = 0."""
    n = len(xs)
    if n < 2:
        raise ValueError("need at least two points")
    mean_x = sum(xs) / n
    mean_y = sum(ys) / n
    sxx = sum((x - mean_x) ** 2 for x in xs)
    sxy = sum((x - mean_x) * (y - mean_y) for x, y in zip(xs, ys))
    syy = sum((y - mean_y) ** 2 for y in ys)
    if sxx == 0:
        raise ValueError("xs are constant")
    slope = sxy / sxx
    intercept = mean_y - slope * mean_x
    r2 = 0.0 if syy == 0 else (sxy * sxy) / (sxx * syy)
    return LinearFit(slope=slope, intercept=intercept, r2=r2)


def run_breakdown_bench(
    store: TraceStore,
    iterations: int,
    trace_id: str | None = None,
    bins: int = 30,
    threshold: float = 0.8,
) -> BenchResult:
    """Load the biggest trace ``iterations`` times, recording per-category
    latency rows."""
    snapshot = store.snapshot()
    db_traces = snapshot.counters["traces"]
    if db_traces == 0:
        raise TraceNotFound("store is empty; nothing to benchmark")
    target = trace_id or snapshot.biggest_trace_id()
    result = BenchResult()
    for iteration in range(iterations):
        _, timings = store.load_trace_aggregates(target, bins=bins, threshold=threshold)
        values = {
            "raw_trace": timings.raw_trace_us,
            "event": timings.event_agg_us,
            "edge": timings.edge_agg_us,
            "contention": timings.contention_agg_us,
        }
        for category in CATEGORIES:
            result.rows.append(
                BenchRow(
                    db_traces=db_traces,
                    iteration=iteration,
                    category=category,
                    latency_us=values[category],
                )
            )
    return result


def run_scaling_bench(
    spec: WorkloadSpec,
    copy_factors: Iterable[int],
    iterations: int,
    data_dir: str | Path | None = None,
    overlap: bool = False,
) -> BenchResult:
    """For each copy factor k, ingest k copies of the base corpus into a
    fresh store and run the breakdown bench against it."""
    factors = list(copy_factors)
    if not factors or any(b <= a for a, b in zip(factors, factors[1:])):
        raise ValueError("copy_factors must be non-empty and strictly increasing")
    if any(k < 1 for k in factors):
        raise ValueError("copy factors must be >= 1")
    base = generate_corpus(spec)
    if not base:
        raise ValueError("workload generated an empty corpus")

    result = BenchResult()
    with tempfile.TemporaryDirectory(prefix="travista-bench-") as tmp:
        root = Path(data_dir) if data_dir is not None else Path(tmp)
        for k in factors:
            store = TraceStore(root / f"copies-{k}", checkpoint_every=10**9)
            try:
                for trace in replicate_corpus(base, k, overlap=overlap):
                    store.ingest(trace)
                result.rows.extend(run_breakdown_bench(store, iterations).rows)
            finally:
                store.close()
    return result
