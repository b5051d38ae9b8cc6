"""Cross-trace aggregation: metric, temporal, and structural.

Everything here is a pure function of an immutable view of store state plus
one trace.  The three aggregate families:

* metric      - latency distribution per task type (histograms),
* temporal    - per-process concurrent-request counts over 1ms buckets,
* structural  - how often an event label appears in instances of a task type,
                and how often a parent type invokes a child type.

Frequencies use presence semantics: an event label or invocation pair counts
at most once per task instance, so loops inside one task do not masquerade
as common behavior.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass, field
from typing import Iterable, Protocol, Sequence

from .errors import NoSamples, UnknownEdge, UnknownLabel, UnknownProcess, UnknownType
from .model import EdgeKind, Task, Trace, normalize_label

DEFAULT_BINS = 30
DEFAULT_THRESHOLD = 0.8
DEFAULT_RARITY_CUTOFF = 0.1

BUCKET_US = 1000  # contention buckets are fixed at 1ms


class AggregateView(Protocol):
    """Read interface aggregation needs from a store snapshot."""

    def has_type(self, task_type: str) -> bool: ...

    def instance_count(self, task_type: str) -> int: ...

    def latency_samples(self, task_type: str) -> Sequence[int]: ...

    def event_presence_count(self, task_type: str, label: str) -> int: ...

    def invocation_presence_count(self, parent_type: str, child_type: str) -> int: ...

    def has_process(self, process_id: str) -> bool: ...

    def activity_overlapping(
        self, process_id: str, start_us: int, end_us: int
    ) -> Iterable[tuple[int, int, str]]: ...


@dataclass
class Histogram:
    """Latency distribution of one task type across all ingested traces.

    Bins are equal-width over the observed [min, max]; each bin interval is
    half-open except the last, which is closed on the right.  highlight_bin
    marks where a focal task instance falls; an out-of-range focal clamps to
    the nearest edge bin and sets highlight_out_of_range.
    """

    task_type: str
    bin_edges: list[float]
    counts: list[int]
    total: int
    highlight_bin: int | None = None
    highlight_out_of_range: bool = False

    def to_dict(self) -> dict:
        return {
            "task_type": self.task_type,
            "bin_edges": self.bin_edges,
            "counts": self.counts,
            "total": self.total,
            "highlight_bin": self.highlight_bin,
            "highlight_out_of_range": self.highlight_out_of_range,
        }


@dataclass
class EventRarity:
    task_type: str
    label: str
    occurrence_count: int
    instance_count: int
    frequency: float

    def to_dict(self) -> dict:
        return {
            "task_type": self.task_type,
            "label": self.label,
            "occurrence_count": self.occurrence_count,
            "instance_count": self.instance_count,
            "frequency": self.frequency,
        }


@dataclass
class EdgeFrequency:
    parent_type: str
    child_type: str
    count: int
    frequency: float

    def to_dict(self) -> dict:
        return {
            "parent_type": self.parent_type,
            "child_type": self.child_type,
            "count": self.count,
            "frequency": self.frequency,
        }


@dataclass
class ContentionTimeline:
    """Per-millisecond concurrent-request counts for one task.

    raw_counts[i] is the number of distinct traces with at least one task
    active on this task's process during absolute ms bucket t0_ms + i; the
    queried trace itself keeps every bucket at >= 1.  scaled divides by the
    maximum raw count across all tasks of the trace.
    """

    task_id: str
    t0_ms: int
    raw_counts: list[int]
    scaled: list[float]
    threshold_flags: list[bool]
    bucket_ms: int = 1

    def to_dict(self) -> dict:
        return {
            "task_id": self.task_id,
            "bucket_ms": self.bucket_ms,
            "t0_ms": self.t0_ms,
            "raw_counts": self.raw_counts,
            "scaled": self.scaled,
            "threshold_flags": self.threshold_flags,
        }


@dataclass
class FeatureSet:
    """Per-trace extraction output; independent of any store state."""

    latency_samples: dict[str, list[int]] = field(default_factory=dict)
    event_occurrences: dict[str, dict[str, set[str]]] = field(default_factory=dict)
    invocation_pairs: dict[str, dict[str, set[str]]] = field(default_factory=dict)
    activity_intervals: dict[str, list[tuple[int, int, str]]] = field(default_factory=dict)


def extract_features(trace: Trace) -> FeatureSet:
    """Extract everything the aggregate tables need from one trace.

    Event labels are normalized here; invocation pairs come only from
    invocation edges (happened-before edges order events, they do not imply
    parent/child structure).
    """
    features = FeatureSet()
    for task in trace.tasks:
        features.latency_samples.setdefault(task.task_type, []).append(task.duration_us)
        features.activity_intervals.setdefault(task.process_id, []).append(
            (task.start_ts, task.end_ts, trace.trace_id)
        )
    tasks_by_id = trace.tasks_by_id
    for event in trace.events:
        owner = tasks_by_id[event.task_id]
        label = normalize_label(event.label)
        features.event_occurrences.setdefault(owner.task_type, {}).setdefault(
            label, set()
        ).add(owner.task_id)
    for edge in trace.edges:
        if edge.kind is not EdgeKind.INVOCATION:
            continue
        parent = tasks_by_id[edge.source.ref_id]
        child = tasks_by_id[edge.target.ref_id]
        features.invocation_pairs.setdefault(parent.task_type, {}).setdefault(
            child.task_type, set()
        ).add(parent.task_id)
    return features


def build_histogram(
    samples: Sequence[int],
    bins: int,
    focal: int | None = None,
    task_type: str = "",
) -> Histogram:
    """Bin duration samples into ``bins`` equal-width bins over [min, max].

    A single-point distribution collapses to one unit-width bin regardless of
    ``bins``.  The focal duration, when given, selects highlight_bin by the
    same half-open rule the counts use; focal values outside the observed
    range clamp to the first/last bin with highlight_out_of_range set.
    """
    if bins < 1:
        raise ValueError(f"bins must be >= 1, got {bins}")
    if not samples:
        raise NoSamples(f"no latency samples for task type {task_type!r}")
    lo = min(samples)
    hi = max(samples)
    if lo == hi:
        edges = [float(lo), float(lo + 1)]
        effective = 1
    else:
        span = hi - lo
        edges = [lo + span * i / bins for i in range(bins)]
        edges.append(float(hi))
        edges[0] = float(lo)
        effective = bins
    counts = [0] * effective
    for value in samples:
        idx = bisect_right(edges, value) - 1
        if idx == effective:  # value == max edge: last bin is closed
            idx = effective - 1
        counts[idx] += 1

    highlight: int | None = None
    out_of_range = False
    if focal is not None:
        if focal < lo:
            highlight = 0
            out_of_range = True
        elif focal > hi:
            highlight = effective - 1
            out_of_range = True
        else:
            highlight = bisect_right(edges, focal) - 1
            if highlight == effective:
                highlight = effective - 1
    return Histogram(
        task_type=task_type,
        bin_edges=edges,
        counts=counts,
        total=len(samples),
        highlight_bin=highlight,
        highlight_out_of_range=out_of_range,
    )


def event_rarity(view: AggregateView, task_type: str, label: str) -> EventRarity:
    """How often ``label`` appears in instances of ``task_type``."""
    if not view.has_type(task_type):
        raise UnknownType(f"no ingested instances of task type {task_type!r}")
    instances = view.instance_count(task_type)
    normalized = normalize_label(label)
    presence = view.event_presence_count(task_type, normalized)
    if presence == 0:
        raise UnknownLabel(
            f"label {normalized!r} never seen with task type {task_type!r}"
        )
    return EventRarity(
        task_type=task_type,
        label=normalized,
        occurrence_count=presence,
        instance_count=instances,
        frequency=presence / instances,
    )


def edge_frequency(view: AggregateView, parent_type: str, child_type: str) -> EdgeFrequency:
    """How often instances of ``parent_type`` invoke a ``child_type`` task."""
    if not view.has_type(parent_type):
        raise UnknownType(f"no ingested instances of task type {parent_type!r}")
    parents = view.instance_count(parent_type)
    count = view.invocation_presence_count(parent_type, child_type)
    if count == 0:
        raise UnknownEdge(
            f"no ingested invocation {parent_type!r} -> {child_type!r}"
        )
    return EdgeFrequency(
        parent_type=parent_type,
        child_type=child_type,
        count=count,
        frequency=count / parents,
    )


def _bucket_range(task: Task) -> tuple[int, int]:
    """First and last absolute ms bucket the task's interval touches."""
    return task.start_ts // BUCKET_US, task.end_ts // BUCKET_US


def _raw_counts(view: AggregateView, task: Task) -> list[int]:
    t0_ms, last_ms = _bucket_range(task)
    n = last_ms - t0_ms + 1
    buckets: list[set[str]] = [set() for _ in range(n)]
    window_lo = t0_ms * BUCKET_US
    window_hi = (last_ms + 1) * BUCKET_US - 1
    for start, end, trace_id in view.activity_overlapping(
        task.process_id, window_lo, window_hi
    ):
        # interval [start, end] overlaps absolute bucket b iff b is within
        # [start//1000, end//1000]
        i_lo = max(0, start // BUCKET_US - t0_ms)
        i_hi = min(n - 1, end // BUCKET_US - t0_ms)
        for i in range(i_lo, i_hi + 1):
            buckets[i].add(trace_id)
    return [len(b) for b in buckets]


def contention_timelines(
    view: AggregateView, trace: Trace, threshold: float = DEFAULT_THRESHOLD
) -> dict[str, ContentionTimeline]:
    """Timelines for every task of the trace, scaled by the trace-wide max."""
    for task in trace.tasks:
        if not view.has_process(task.process_id):
            raise UnknownProcess(f"process {task.process_id!r} has no activity index")
    raw = {task.task_id: _raw_counts(view, task) for task in trace.tasks}
    trace_max = max(max(counts) for counts in raw.values())
    timelines: dict[str, ContentionTimeline] = {}
    for task in trace.tasks:
        counts = raw[task.task_id]
        scaled = [c / trace_max for c in counts]
        timelines[task.task_id] = ContentionTimeline(
            task_id=task.task_id,
            t0_ms=_bucket_range(task)[0],
            raw_counts=counts,
            scaled=scaled,
            threshold_flags=[s > threshold for s in scaled],
        )
    return timelines


def contention_timeline(
    view: AggregateView,
    trace: Trace,
    task: Task,
    threshold: float = DEFAULT_THRESHOLD,
) -> ContentionTimeline:
    """Timeline for one task; scaling still spans all tasks of the trace."""
    return contention_timelines(view, trace, threshold)[task.task_id]
