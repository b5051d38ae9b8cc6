"""Persistent trace storage with incrementally maintained aggregate tables.

Layout: one directory holding an append-only log of length-prefixed,
CRC-checked canonical-JSON trace documents (``traces.log``) plus a
periodically rewritten checkpoint of the aggregate tables
(``checkpoint.json``).  On open, the checkpoint is loaded (when valid) and
the log tail is replayed, so every acknowledged ingest survives a restart and
a torn tail record is dropped whole.

Aggregate tables are kept as per-key append columns:

* task-type table   - type -> instance count + raw latency sample column
* event table       - type -> rows of (label, task_id), one per instance
                      that contained the label
* edge table        - parent type -> rows of (child type, parent task id)
* activity index    - process -> rows of (start_us, end_us, trace_id)

Frequency and contention queries scan their column the way a database counts
an index range, so load latency grows with the number of ingested traces;
raw-trace reads are point lookups by file offset and stay flat.

Concurrency: a single writer serializes ingestion; readers grab an immutable
snapshot (column lengths captured under a short lock) and never block the
writer afterwards.  Columns are append-only, which is what makes the
captured-length snapshot consistent.
"""

from __future__ import annotations

import json
import logging
import os
import struct
import threading
import zlib
from dataclasses import dataclass, field
from pathlib import Path
from time import perf_counter_ns
from typing import Iterator, Sequence

from . import aggregation
from .aggregation import (
    ContentionTimeline,
    EdgeFrequency,
    EventRarity,
    FeatureSet,
    Histogram,
    build_histogram,
    contention_timelines,
    edge_frequency,
    event_rarity,
    extract_features,
)
from .errors import DuplicateTrace, StorageError, TraceNotFound
from .model import EdgeKind, Trace, canonical_trace_bytes, parse_trace

logger = logging.getLogger(__name__)

LOG_MAGIC = b"TRAVLOG1"
LOG_NAME = "traces.log"
CHECKPOINT_NAME = "checkpoint.json"
CHECKPOINT_MAGIC = "TRAVISTA_TABLES"
CHECKPOINT_VERSION = 1
MAX_LIST_LIMIT = 1000

_LEN = struct.Struct(">I")


@dataclass
class IngestReceipt:
    trace_id: str
    preprocessing_us: float


@dataclass
class TimingBreakdown:
    """Per-category load latencies for one aggregate payload, microseconds.

    metric_agg_us covers the histogram phase; it rides alongside the four
    core categories rather than replacing any of them.
    """

    raw_trace_us: float = 0.0
    event_agg_us: float = 0.0
    edge_agg_us: float = 0.0
    contention_agg_us: float = 0.0
    metric_agg_us: float = 0.0

    def to_dict(self) -> dict:
        return {
            "raw_trace_us": self.raw_trace_us,
            "event_agg_us": self.event_agg_us,
            "edge_agg_us": self.edge_agg_us,
            "contention_agg_us": self.contention_agg_us,
            "metric_agg_us": self.metric_agg_us,
        }


@dataclass
class TraceSummary:
    trace_id: str
    root_type: str
    start_ts: int
    end_ts: int
    task_count: int
    event_count: int

    @property
    def duration_us(self) -> int:
        return self.end_ts - self.start_ts

    def to_dict(self) -> dict:
        return {
            "trace_id": self.trace_id,
            "root_type": self.root_type,
            "start_us": self.start_ts,
            "duration_us": self.duration_us,
            "task_count": self.task_count,
            "event_count": self.event_count,
        }


@dataclass
class TraceAggregatesPayload:
    """Everything the single-trace view needs, in one bundle.

    ``histograms`` follows ``lane_order`` (tasks by start time, then id), the
    same top-to-bottom order the Gantt chart draws, so index i links lane i
    to histogram i.  Outlier flags pair each rarity/frequency with whether it
    falls under the rarity cutoff.
    """

    trace: Trace
    lane_order: list[str]
    histograms: list[Histogram]
    event_rarities: dict[str, tuple[EventRarity, bool]]
    edge_frequencies: dict[int, tuple[EdgeFrequency, bool]]
    contention: dict[str, ContentionTimeline]
    timings: TimingBreakdown
    params: dict


@dataclass
class _TypeColumn:
    count: int = 0
    samples: list[int] = field(default_factory=list)


@dataclass
class _TraceRecord:
    trace_id: str
    offset: int
    length: int
    seq: int
    summary: TraceSummary


class _BoundedSeq(Sequence):
    """Read-only prefix view over an append-only list."""

    __slots__ = ("_data", "_n")

    def __init__(self, data: list, n: int):
        self._data = data
        self._n = n

    def __len__(self) -> int:
        return self._n

    def __getitem__(self, idx):
        if isinstance(idx, slice):
            return [self._data[i] for i in range(*idx.indices(self._n))]
        if idx < 0:
            idx += self._n
        if not 0 <= idx < self._n:
            raise IndexError(idx)
        return self._data[idx]

    def __iter__(self) -> Iterator:
        data = self._data
        for i in range(self._n):
            yield data[i]


def _root_type(trace: Trace) -> str:
    """Type of the root task: no incoming invocation edge, earliest start."""
    invoked = {
        e.target.ref_id for e in trace.edges if e.kind is EdgeKind.INVOCATION
    }
    roots = [t for t in trace.tasks if t.task_id not in invoked]
    candidates = roots or trace.tasks
    return min(candidates, key=lambda t: (t.start_ts, t.task_id)).task_type


def summarize(trace: Trace) -> TraceSummary:
    return TraceSummary(
        trace_id=trace.trace_id,
        root_type=_root_type(trace),
        start_ts=trace.start_ts,
        end_ts=trace.end_ts,
        task_count=len(trace.tasks),
        event_count=len(trace.events),
    )


class StoreSnapshot:
    """Immutable view of the store at one ingestion boundary.

    Implements the aggregation module's view protocol; every read is bounded
    by the column lengths captured at snapshot time.
    """

    def __init__(
        self,
        store: "TraceStore",
        seq: int,
        type_counts: dict[str, int],
        sample_lens: dict[str, int],
        event_lens: dict[str, int],
        edge_lens: dict[str, int],
        activity_lens: dict[str, int],
        n_traces: int,
        counters: dict[str, int],
    ):
        self._store = store
        self.seq = seq
        self._type_counts = type_counts
        self._sample_lens = sample_lens
        self._event_lens = event_lens
        self._edge_lens = edge_lens
        self._activity_lens = activity_lens
        self._n_traces = n_traces
        self.counters = counters

    # -- aggregation view protocol ------------------------------------

    def has_type(self, task_type: str) -> bool:
        return self._type_counts.get(task_type, 0) > 0

    def instance_count(self, task_type: str) -> int:
        return self._type_counts.get(task_type, 0)

    def latency_samples(self, task_type: str) -> Sequence[int]:
        n = self._sample_lens.get(task_type, 0)
        column = self._store._types.get(task_type)
        return _BoundedSeq(column.samples if column else [], n)

    def event_presence_count(self, task_type: str, label: str) -> int:
        n = self._event_lens.get(task_type, 0)
        rows = self._store._event_rows.get(task_type)
        if not rows or n == 0:
            return 0
        count = 0
        for i in range(n):
            if rows[i][0] == label:
                count += 1
        return count

    def invocation_presence_count(self, parent_type: str, child_type: str) -> int:
        n = self._edge_lens.get(parent_type, 0)
        rows = self._store._edge_rows.get(parent_type)
        if not rows or n == 0:
            return 0
        count = 0
        for i in range(n):
            if rows[i][0] == child_type:
                count += 1
        return count

    def has_process(self, process_id: str) -> bool:
        return self._activity_lens.get(process_id, 0) > 0

    def activity_overlapping(
        self, process_id: str, start_us: int, end_us: int
    ) -> list[tuple[int, int, str]]:
        n = self._activity_lens.get(process_id, 0)
        rows = self._store._activity.get(process_id)
        if not rows or n == 0:
            return []
        matches = [
            rows[i]
            for i in range(n)
            if rows[i][0] <= end_us and rows[i][1] >= start_us
        ]
        matches.sort()
        return matches

    # -- trace reads ----------------------------------------------------

    def _record(self, trace_id: str) -> _TraceRecord:
        record = self._store._trace_index.get(trace_id)
        if record is None or record.seq > self.seq:
            raise TraceNotFound(f"trace {trace_id!r} not in store")
        return record

    def has_trace(self, trace_id: str) -> bool:
        record = self._store._trace_index.get(trace_id)
        return record is not None and record.seq <= self.seq

    def get_trace_bytes(self, trace_id: str) -> bytes:
        record = self._record(trace_id)
        return self._store._read_payload(record.offset, record.length)

    def get_trace(self, trace_id: str) -> Trace:
        raw = self.get_trace_bytes(trace_id)
        trace, report = parse_trace(raw)
        if trace is None:
            raise StorageError(
                f"stored document for {trace_id!r} failed validation: {report.errors}"
            )
        return trace

    def summary(self, trace_id: str) -> TraceSummary:
        return self._record(trace_id).summary

    def list_traces(
        self, offset: int = 0, limit: int = 100, order: str = "start_ts"
    ) -> list[TraceSummary]:
        if limit > MAX_LIST_LIMIT:
            raise ValueError(f"limit must be <= {MAX_LIST_LIMIT}")
        if offset < 0 or limit < 0:
            raise ValueError("offset and limit must be non-negative")
        ids = self._store._trace_order[: self._n_traces]
        summaries = [self._store._trace_index[i].summary for i in ids]
        if order == "start_ts":
            summaries.sort(key=lambda s: (s.start_ts, s.trace_id))
        elif order == "duration":
            summaries.sort(key=lambda s: (-s.duration_us, s.trace_id))
        else:
            raise ValueError(f"unknown order {order!r}")
        return summaries[offset : offset + limit]

    def biggest_trace_id(self) -> str:
        """Most tasks, then most events, then lexicographically first id."""
        ids = self._store._trace_order[: self._n_traces]
        if not ids:
            raise TraceNotFound("store is empty")
        summaries = (self._store._trace_index[i].summary for i in ids)
        best = min(summaries, key=lambda s: (-s.task_count, -s.event_count, s.trace_id))
        return best.trace_id

    def task_types(self) -> list[str]:
        return sorted(t for t, c in self._type_counts.items() if c > 0)

    # -- payload assembly ------------------------------------------------

    def load_trace_aggregates(
        self,
        trace_id: str,
        bins: int = aggregation.DEFAULT_BINS,
        threshold: float = aggregation.DEFAULT_THRESHOLD,
        rarity_cutoff: float = aggregation.DEFAULT_RARITY_CUTOFF,
    ) -> tuple[TraceAggregatesPayload, TimingBreakdown]:
        """Assemble the single-trace view payload, timing each query phase."""
        if bins < 1:
            raise ValueError("bins must be >= 1")
        if not 0 < threshold <= 1:
            raise ValueError("threshold must be in (0, 1]")

        timings = TimingBreakdown()

        t0 = perf_counter_ns()
        trace = self.get_trace(trace_id)
        timings.raw_trace_us = (perf_counter_ns() - t0) / 1000.0

        lane_tasks = sorted(trace.tasks, key=lambda t: (t.start_ts, t.task_id))
        lane_order = [t.task_id for t in lane_tasks]

        t0 = perf_counter_ns()
        histograms = [
            build_histogram(
                self.latency_samples(task.task_type),
                bins,
                focal=task.duration_us,
                task_type=task.task_type,
            )
            for task in lane_tasks
        ]
        timings.metric_agg_us = (perf_counter_ns() - t0) / 1000.0

        tasks_by_id = trace.tasks_by_id
        t0 = perf_counter_ns()
        rarity_cache: dict[tuple[str, str], EventRarity] = {}
        event_rarities: dict[str, tuple[EventRarity, bool]] = {}
        for event in trace.events:
            task_type = tasks_by_id[event.task_id].task_type
            key = (task_type, aggregation.normalize_label(event.label))
            rarity = rarity_cache.get(key)
            if rarity is None:
                rarity = event_rarity(self, task_type, event.label)
                rarity_cache[key] = rarity
            event_rarities[event.event_id] = (rarity, rarity.frequency < rarity_cutoff)
        timings.event_agg_us = (perf_counter_ns() - t0) / 1000.0

        t0 = perf_counter_ns()
        frequency_cache: dict[tuple[str, str], EdgeFrequency] = {}
        edge_frequencies: dict[int, tuple[EdgeFrequency, bool]] = {}
        for i, edge in enumerate(trace.edges):
            if edge.kind is not EdgeKind.INVOCATION:
                continue
            pair = (
                tasks_by_id[edge.source.ref_id].task_type,
                tasks_by_id[edge.target.ref_id].task_type,
            )
            frequency = frequency_cache.get(pair)
            if frequency is None:
                frequency = edge_frequency(self, *pair)
                frequency_cache[pair] = frequency
            edge_frequencies[i] = (frequency, frequency.frequency < rarity_cutoff)
        timings.edge_agg_us = (perf_counter_ns() - t0) / 1000.0

        t0 = perf_counter_ns()
        contention = contention_timelines(self, trace, threshold)
        timings.contention_agg_us = (perf_counter_ns() - t0) / 1000.0

        payload = TraceAggregatesPayload(
            trace=trace,
            lane_order=lane_order,
            histograms=histograms,
            event_rarities=event_rarities,
            edge_frequencies=edge_frequencies,
            contention=contention,
            timings=timings,
            params={"bins": bins, "threshold": threshold, "rarity_cutoff": rarity_cutoff},
        )
        return payload, timings

    # -- canonical table dumps -------------------------------------------

    def canonical_aggregate_state(self) -> dict:
        """Order-independent form of every aggregate table.

        Two stores that ingested the same trace set, in any order, produce
        identical structures here (and identical bytes via
        canonical_aggregate_bytes).
        """
        types = {
            t: {
                "count": self._type_counts[t],
                "samples": sorted(self.latency_samples(t)),
            }
            for t in sorted(self._type_counts)
            if self._type_counts[t] > 0
        }
        events = {}
        for task_type in sorted(self._event_lens):
            n = self._event_lens[task_type]
            if n == 0:
                continue
            rows = self._store._event_rows[task_type]
            events[task_type] = sorted([rows[i][0], rows[i][1]] for i in range(n))
        edges = {}
        for parent in sorted(self._edge_lens):
            n = self._edge_lens[parent]
            if n == 0:
                continue
            rows = self._store._edge_rows[parent]
            edges[parent] = sorted([rows[i][0], rows[i][1]] for i in range(n))
        activity = {}
        for process in sorted(self._activity_lens):
            n = self._activity_lens[process]
            if n == 0:
                continue
            rows = self._store._activity[process]
            activity[process] = sorted(
                [rows[i][0], rows[i][1], rows[i][2]] for i in range(n)
            )
        return {
            "counters": dict(sorted(self.counters.items())),
            "types": types,
            "events": events,
            "edges": edges,
            "activity": activity,
        }

    def canonical_aggregate_bytes(self) -> bytes:
        return json.dumps(
            self.canonical_aggregate_state(), sort_keys=True, separators=(",", ":")
        ).encode("utf-8")


class TraceStore:
    """Single-writer, multi-reader trace store rooted at ``data_dir``."""

    def __init__(self, data_dir: str | Path, checkpoint_every: int = 512):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self.checkpoint_every = checkpoint_every

        self._writer_lock = threading.Lock()
        self._state_lock = threading.Lock()
        self._seq = 0
        self._since_checkpoint = 0
        self._closed = False

        self._types: dict[str, _TypeColumn] = {}
        self._event_rows: dict[str, list[tuple[str, str]]] = {}
        self._edge_rows: dict[str, list[tuple[str, str]]] = {}
        self._activity: dict[str, list[tuple[int, int, str]]] = {}
        self._trace_index: dict[str, _TraceRecord] = {}
        self._trace_order: list[str] = []
        self._counters = {"traces": 0, "tasks": 0, "events": 0}

        self._log_path = self.data_dir / LOG_NAME
        self._checkpoint_path = self.data_dir / CHECKPOINT_NAME
        self._open_log()
        self._recover()

    # -- log file handling -------------------------------------------------

    def _open_log(self) -> None:
        new = not self._log_path.exists() or self._log_path.stat().st_size == 0
        self._log_file = open(self._log_path, "ab")
        if new:
            self._log_file.write(LOG_MAGIC)
            self._log_file.flush()
        self._read_fd = os.open(self._log_path, os.O_RDONLY)
        header = os.pread(self._read_fd, len(LOG_MAGIC), 0)
        if header != LOG_MAGIC:
            raise StorageError(f"{self._log_path} is not a trace log (bad magic)")

    def _append_record(self, payload: bytes) -> int:
        offset = self._log_file.tell()
        self._log_file.write(_LEN.pack(len(payload)))
        self._log_file.write(payload)
        self._log_file.write(_LEN.pack(zlib.crc32(payload)))
        self._log_file.flush()
        return offset

    def _read_payload(self, offset: int, length: int) -> bytes:
        data = os.pread(self._read_fd, length, offset + _LEN.size)
        if len(data) != length:
            raise StorageError(f"short read at offset {offset}")
        return data

    def _scan_log(self, start: int) -> Iterator[tuple[int, bytes]]:
        """Yield (offset, payload) for intact records; stop at a torn tail."""
        size = self._log_path.stat().st_size
        offset = start
        while offset < size:
            header = os.pread(self._read_fd, _LEN.size, offset)
            if len(header) < _LEN.size:
                break
            (length,) = _LEN.unpack(header)
            frame_end = offset + _LEN.size + length + _LEN.size
            if frame_end > size:
                break
            payload = os.pread(self._read_fd, length, offset + _LEN.size)
            crc_raw = os.pread(self._read_fd, _LEN.size, offset + _LEN.size + length)
            if (zlib.crc32(payload),) != _LEN.unpack(crc_raw):
                break
            yield offset, payload
            offset = frame_end
        if offset < size:
            logger.warning(
                "truncating torn tail of %s at offset %d (file size %d)",
                self._log_path,
                offset,
                size,
            )
            self._log_file.truncate(offset)
            self._log_file.flush()

    # -- recovery ----------------------------------------------------------

    def _recover(self) -> None:
        replay_from = len(LOG_MAGIC)
        checkpoint = self._load_checkpoint()
        if checkpoint is not None:
            self._restore_checkpoint(checkpoint)
            replay_from = checkpoint["log_bytes"]
        for offset, payload in self._scan_log(replay_from):
            trace, report = parse_trace(payload)
            if trace is None:
                raise StorageError(
                    f"log record at offset {offset} failed validation: {report.errors}"
                )
            self._apply(trace, extract_features(trace), offset, len(payload))

    def _load_checkpoint(self) -> dict | None:
        if not self._checkpoint_path.exists():
            return None
        try:
            data = json.loads(self._checkpoint_path.read_text())
        except (json.JSONDecodeError, OSError) as exc:
            logger.warning("ignoring unreadable checkpoint: %s", exc)
            return None
        if data.get("magic") != CHECKPOINT_MAGIC or data.get("version") != CHECKPOINT_VERSION:
            logger.warning("ignoring checkpoint with unknown magic/version")
            return None
        if data.get("log_bytes", 0) > self._log_path.stat().st_size:
            logger.warning("checkpoint is ahead of the log; rebuilding from scratch")
            return None
        return data

    def _restore_checkpoint(self, data: dict) -> None:
        self._counters = dict(data["counters"])
        for task_type, column in data["types"].items():
            self._types[task_type] = _TypeColumn(
                count=column["count"], samples=list(column["samples"])
            )
        for task_type, rows in data["events"].items():
            self._event_rows[task_type] = [(r[0], r[1]) for r in rows]
        for parent, rows in data["edges"].items():
            self._edge_rows[parent] = [(r[0], r[1]) for r in rows]
        for process, rows in data["activity"].items():
            self._activity[process] = [(r[0], r[1], r[2]) for r in rows]
        for trace_id in data["trace_order"]:
            entry = data["trace_index"][trace_id]
            self._seq += 1
            summary = TraceSummary(
                trace_id=trace_id,
                root_type=entry["root_type"],
                start_ts=entry["start_us"],
                end_ts=entry["end_us"],
                task_count=entry["task_count"],
                event_count=entry["event_count"],
            )
            self._trace_index[trace_id] = _TraceRecord(
                trace_id=trace_id,
                offset=entry["offset"],
                length=entry["length"],
                seq=self._seq,
                summary=summary,
            )
            self._trace_order.append(trace_id)

    def _write_checkpoint(self) -> None:
        snapshot = self.snapshot()
        state = snapshot.canonical_aggregate_state()
        trace_index = {}
        for trace_id in self._trace_order:
            record = self._trace_index[trace_id]
            summary = record.summary
            trace_index[trace_id] = {
                "offset": record.offset,
                "length": record.length,
                "root_type": summary.root_type,
                "start_us": summary.start_ts,
                "end_us": summary.end_ts,
                "task_count": summary.task_count,
                "event_count": summary.event_count,
            }
        payload = {
            "magic": CHECKPOINT_MAGIC,
            "version": CHECKPOINT_VERSION,
            "log_bytes": self._log_file.tell(),
            "trace_order": list(self._trace_order),
            "trace_index": trace_index,
            **state,
        }
        self._log_file.flush()
        os.fsync(self._log_file.fileno())
        tmp = self._checkpoint_path.with_suffix(".tmp")
        tmp.write_text(json.dumps(payload, sort_keys=True))
        os.replace(tmp, self._checkpoint_path)
        self._since_checkpoint = 0

    # -- ingestion -----------------------------------------------------------

    def _apply(self, trace: Trace, features: FeatureSet, offset: int, length: int) -> None:
        """Apply one trace's contributions to every table; caller holds locks
        or is single-threaded recovery."""
        for task_type, samples in features.latency_samples.items():
            column = self._types.get(task_type)
            if column is None:
                column = self._types[task_type] = _TypeColumn()
            column.count += len(samples)
            column.samples.extend(samples)
        for task_type, labels in features.event_occurrences.items():
            rows = self._event_rows.get(task_type)
            if rows is None:
                rows = self._event_rows[task_type] = []
            for label, task_ids in labels.items():
                rows.extend((label, task_id) for task_id in sorted(task_ids))
        for parent, children in features.invocation_pairs.items():
            rows = self._edge_rows.get(parent)
            if rows is None:
                rows = self._edge_rows[parent] = []
            for child, parent_ids in children.items():
                rows.extend((child, parent_id) for parent_id in sorted(parent_ids))
        for process, intervals in features.activity_intervals.items():
            rows = self._activity.get(process)
            if rows is None:
                rows = self._activity[process] = []
            rows.extend(intervals)
        self._counters["traces"] += 1
        self._counters["tasks"] += len(trace.tasks)
        self._counters["events"] += len(trace.events)
        self._seq += 1
        record = _TraceRecord(
            trace_id=trace.trace_id,
            offset=offset,
            length=length,
            seq=self._seq,
            summary=summarize(trace),
        )
        self._trace_index[trace.trace_id] = record
        self._trace_order.append(trace.trace_id)

    def ingest(self, trace: Trace) -> IngestReceipt:
        """Persist one validated trace and fold it into the aggregates.

        The update is atomic: snapshots taken concurrently see either none or
        all of this trace's contributions.  The receipt reports the combined
        feature-extraction and table-update wall time.
        """
        with self._writer_lock:
            if trace.trace_id in self._trace_index:
                raise DuplicateTrace(f"trace {trace.trace_id!r} already ingested")
            t0 = perf_counter_ns()
            features = extract_features(trace)
            extract_ns = perf_counter_ns() - t0

            payload = canonical_trace_bytes(trace)
            offset = self._append_record(payload)

            t1 = perf_counter_ns()
            with self._state_lock:
                self._apply(trace, features, offset, len(payload))
            update_ns = perf_counter_ns() - t1

            self._since_checkpoint += 1
            if self._since_checkpoint >= self.checkpoint_every:
                self._write_checkpoint()
        return IngestReceipt(
            trace_id=trace.trace_id,
            preprocessing_us=(extract_ns + update_ns) / 1000.0,
        )

    # -- reads ----------------------------------------------------------------

    def snapshot(self) -> StoreSnapshot:
        with self._state_lock:
            return StoreSnapshot(
                store=self,
                seq=self._seq,
                type_counts={t: c.count for t, c in self._types.items()},
                sample_lens={t: len(c.samples) for t, c in self._types.items()},
                event_lens={t: len(r) for t, r in self._event_rows.items()},
                edge_lens={t: len(r) for t, r in self._edge_rows.items()},
                activity_lens={p: len(r) for p, r in self._activity.items()},
                n_traces=len(self._trace_order),
                counters=dict(self._counters),
            )

    def get_trace(self, trace_id: str) -> Trace:
        return self.snapshot().get_trace(trace_id)

    def get_trace_bytes(self, trace_id: str) -> bytes:
        return self.snapshot().get_trace_bytes(trace_id)

    def load_trace_aggregates(
        self,
        trace_id: str,
        bins: int = aggregation.DEFAULT_BINS,
        threshold: float = aggregation.DEFAULT_THRESHOLD,
        rarity_cutoff: float = aggregation.DEFAULT_RARITY_CUTOFF,
    ) -> tuple[TraceAggregatesPayload, TimingBreakdown]:
        return self.snapshot().load_trace_aggregates(
            trace_id, bins=bins, threshold=threshold, rarity_cutoff=rarity_cutoff
        )

    def query_process_activity(
        self, process_id: str, window: tuple[int, int]
    ) -> list[tuple[int, int, str]]:
        """Stored intervals on a process overlapping [window_start, window_end]."""
        return self.snapshot().activity_overlapping(process_id, window[0], window[1])

    def list_traces(
        self, offset: int = 0, limit: int = 100, order: str = "start_ts"
    ) -> list[TraceSummary]:
        return self.snapshot().list_traces(offset=offset, limit=limit, order=order)

    def health(self) -> dict:
        snapshot = self.snapshot()
        return {
            "traces": snapshot.counters["traces"],
            "tasks": snapshot.counters["tasks"],
            "events": snapshot.counters["events"],
            "task_types": len(snapshot.task_types()),
            "data_dir": str(self.data_dir),
        }

    def close(self) -> None:
        with self._writer_lock:
            if self._closed:
                return
            self._closed = True
            self._write_checkpoint()
            self._log_file.close()
            os.close(self._read_fd)

    def __enter__(self) -> "TraceStore":
        return self

    def __exit__(self, *exc) -> None:
        self.close()
