"""Trace data model, interchange parsing, and DAG validation.

The interchange format is one JSON document per trace:

    {
      "trace_id": "abc",
      "tasks": [
        {"task_id": "t1", "task_type": "svc:op", "process_id": "p1",
         "thread_id": "w1",
         "start_us": 1000, "end_us": 2500,
         "annotations": {"k": "v"}}
      ],
      "events": [
        {"event_id": "e1", "task_id": "t1", "label": "cache lookup", "ts_us": 1200}
      ],
      "edges": [
        {"src": {"task": "t1"}, "dst": {"task": "t2"}, "kind": "invocation"},
        {"src": {"event": "e1"}, "dst": {"event": "e2"}, "kind": "happened_before"}
      ]
    }

"thread_id" and "annotations" are optional.  Timestamps are integer
microseconds since the Unix epoch.

An event-only variant is also accepted: the document has no "tasks" key and
every event additionally carries "process_id" (plus optional "thread_id" and
"begin").  Such documents are grouped into tasks, one per contiguous run of
events on a (process_id, thread_id) pair, splitting before each event tagged
"begin": true.  Serializing a parsed event-only trace yields the task form.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property

ERR_PARSE = "PARSE"
ERR_SCHEMA = "SCHEMA"
ERR_EMPTY_TRACE = "EMPTY_TRACE"
ERR_EMPTY_TRACE_ID = "EMPTY_TRACE_ID"
ERR_DUPLICATE_ID = "DUPLICATE_ID"
ERR_EMPTY_TASK_TYPE = "EMPTY_TASK_TYPE"
ERR_EMPTY_LABEL = "EMPTY_LABEL"
ERR_NEGATIVE_DURATION = "NEGATIVE_DURATION"
ERR_DANGLING_REF = "DANGLING_REF"
ERR_INVALID_EDGE = "INVALID_EDGE"
ERR_CYCLE = "CYCLE"

WARN_EVENT_OUT_OF_RANGE = "EVENT_OUT_OF_RANGE"
WARN_NO_THREAD = "NO_THREAD"
WARN_TASK_CYCLE_VIA_EVENTS = "TASK_CYCLE_VIA_EVENTS"

LABEL_PLACEHOLDER = "<*>"

# Hex-looking tokens (0x-prefixed or bare runs of 8+ hex chars) first, then
# any remaining digit run.  "retry 3" and "retry 7" normalize identically.
_HEX_TOKEN_RE = re.compile(r"\b(?:0[xX][0-9a-fA-F]+|[0-9a-fA-F]{8,})\b")
_DIGIT_RUN_RE = re.compile(r"\d+")


def normalize_label(label: str) -> str:
    """Collapse numeric and hex tokens in a log message to one template."""
    out = _HEX_TOKEN_RE.sub(LABEL_PLACEHOLDER, label)
    return _DIGIT_RUN_RE.sub(LABEL_PLACEHOLDER, out)


class EdgeKind(str, Enum):
    INVOCATION = "invocation"
    HAPPENED_BEFORE = "happened_before"


@dataclass
class Task:
    """One unit of work: a span, or a grouped run of events."""

    task_id: str
    task_type: str
    process_id: str
    start_ts: int
    end_ts: int
    thread_id: str | None = None
    annotations: dict[str, str] = field(default_factory=dict)

    @property
    def duration_us(self) -> int:
        return self.end_ts - self.start_ts


@dataclass
class Event:
    """A timestamped, labeled log point inside a task.

    ``label`` keeps the string as ingested; aggregation normalizes it via
    :func:`normalize_label` so the raw trace round-trips byte-exactly.
    """

    event_id: str
    task_id: str
    label: str
    timestamp: int


@dataclass
class EndpointRef:
    """Reference to an edge endpoint: ``kind`` is "task" or "event"."""

    kind: str
    ref_id: str


@dataclass
class Edge:
    source: EndpointRef
    target: EndpointRef
    kind: EdgeKind


@dataclass
class Trace:
    """A validated DAG of tasks, events, and edges for one request."""

    trace_id: str
    tasks: list[Task]
    events: list[Event]
    edges: list[Edge]
    start_ts: int = 0
    end_ts: int = 0

    @cached_property
    def tasks_by_id(self) -> dict[str, Task]:
        return {t.task_id: t for t in self.tasks}

    @cached_property
    def events_by_id(self) -> dict[str, Event]:
        return {e.event_id: e for e in self.events}

    @property
    def duration_us(self) -> int:
        return self.end_ts - self.start_ts


@dataclass
class ValidationReport:
    errors: list[tuple[str, str]] = field(default_factory=list)
    warnings: list[tuple[str, str]] = field(default_factory=list)

    def error(self, code: str, message: str) -> None:
        self.errors.append((code, message))

    def warn(self, code: str, message: str) -> None:
        self.warnings.append((code, message))

    def has_code(self, code: str) -> bool:
        return any(c == code for c, _ in self.errors) or any(
            c == code for c, _ in self.warnings
        )

    @property
    def ok(self) -> bool:
        return not self.errors

    def to_dict(self) -> dict:
        return {
            "errors": [{"code": c, "message": m} for c, m in self.errors],
            "warnings": [{"code": c, "message": m} for c, m in self.warnings],
        }


def _is_int(value) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def _has_cycle(nodes, edge_pairs) -> bool:
    """Kahn's algorithm; True iff the directed graph has a cycle."""
    indegree = {n: 0 for n in nodes}
    adjacency: dict[str, list[str]] = {n: [] for n in nodes}
    for src, dst in edge_pairs:
        adjacency[src].append(dst)
        indegree[dst] += 1
    queue = [n for n, d in indegree.items() if d == 0]
    seen = 0
    while queue:
        node = queue.pop()
        seen += 1
        for nxt in adjacency[node]:
            indegree[nxt] -= 1
            if indegree[nxt] == 0:
                queue.append(nxt)
    return seen != len(indegree)


def derive_tasks(
    event_records: list[dict],
) -> tuple[list[Task], list[Event], list[tuple[str, str]]]:
    """Group event-only records into tasks.

    Each record needs "event_id", "label", "ts_us", "process_id" and may
    carry "thread_id" and "begin".  Events on one (process, thread) pair form
    one task per contiguous run, split before each begin-tagged event.  The
    run's task_type is the normalized label of its begin event when present,
    else of its earliest event.  Records without a thread fall into a
    per-process catch-all task and produce a warning.
    """
    warnings: list[tuple[str, str]] = []
    groups: dict[tuple[str, str | None], list[dict]] = {}
    orphan_processes: dict[str, int] = {}
    for record in event_records:
        process_id = record["process_id"]
        thread_id = record.get("thread_id")
        if thread_id is None:
            orphan_processes[process_id] = orphan_processes.get(process_id, 0) + 1
        groups.setdefault((process_id, thread_id), []).append(record)
    for process_id, count in sorted(orphan_processes.items()):
        warnings.append(
            (
                WARN_NO_THREAD,
                f"{count} event(s) on process {process_id!r} lack thread_id; "
                "assigned to a per-process catch-all task",
            )
        )

    tasks: list[Task] = []
    events: list[Event] = []
    ordered_groups = sorted(
        groups.items(),
        key=lambda item: (min(r["ts_us"] for r in item[1]), item[0][0], item[0][1] or ""),
    )
    index = 0
    for (process_id, thread_id), records in ordered_groups:
        records = sorted(records, key=lambda r: r["ts_us"])
        runs: list[list[dict]] = [[]]
        for record in records:
            if record.get("begin") and runs[-1]:
                runs.append([])
            runs[-1].append(record)
        for run in runs:
            task_id = f"task{index}-{process_id}"
            index += 1
            begin = next((r for r in run if r.get("begin")), run[0])
            tasks.append(
                Task(
                    task_id=task_id,
                    task_type=normalize_label(begin["label"]),
                    process_id=process_id,
                    thread_id=thread_id,
                    start_ts=run[0]["ts_us"],
                    end_ts=run[-1]["ts_us"],
                )
            )
            for record in run:
                events.append(
                    Event(
                        event_id=record["event_id"],
                        task_id=task_id,
                        label=record["label"],
                        timestamp=record["ts_us"],
                    )
                )
    return tasks, events, warnings


def validate_dag(trace: Trace) -> ValidationReport:
    """Check every trace invariant; errors make the trace unusable.

    Cycles among tasks (invocation edges) or among events (happened-before
    edges) are errors.  Happened-before edges whose projection onto owning
    tasks closes a task-level cycle only warn: request/response event pairs
    between two tasks are legitimate.
    """
    report = ValidationReport()
    if not trace.trace_id:
        report.error(ERR_EMPTY_TRACE_ID, "trace_id is empty")
    if not trace.tasks:
        report.error(ERR_EMPTY_TRACE, "trace has no tasks")
        return report

    task_ids: set[str] = set()
    for task in trace.tasks:
        if task.task_id in task_ids:
            report.error(ERR_DUPLICATE_ID, f"duplicate task_id {task.task_id!r}")
        task_ids.add(task.task_id)
        if not task.task_type:
            report.error(ERR_EMPTY_TASK_TYPE, f"task {task.task_id!r} has empty task_type")
        if task.end_ts < task.start_ts:
            report.error(
                ERR_NEGATIVE_DURATION,
                f"task {task.task_id!r} ends at {task.end_ts} before start {task.start_ts}",
            )

    event_ids: set[str] = set()
    event_owner: dict[str, str] = {}
    for event in trace.events:
        if event.event_id in event_ids:
            report.error(ERR_DUPLICATE_ID, f"duplicate event_id {event.event_id!r}")
        event_ids.add(event.event_id)
        event_owner[event.event_id] = event.task_id
        if not event.label:
            report.error(ERR_EMPTY_LABEL, f"event {event.event_id!r} has empty label")
        if event.task_id not in task_ids:
            report.error(
                ERR_DANGLING_REF,
                f"event {event.event_id!r} references unknown task {event.task_id!r}",
            )
        else:
            owner = trace.tasks_by_id.get(event.task_id)
            if owner and not (owner.start_ts <= event.timestamp <= owner.end_ts):
                report.warn(
                    WARN_EVENT_OUT_OF_RANGE,
                    f"event {event.event_id!r} at {event.timestamp} lies outside "
                    f"task {owner.task_id!r} [{owner.start_ts}, {owner.end_ts}]",
                )

    invocation_pairs: list[tuple[str, str]] = []
    happened_pairs: list[tuple[str, str]] = []
    for i, edge in enumerate(trace.edges):
        endpoints_ok = True
        for endpoint in (edge.source, edge.target):
            known = task_ids if endpoint.kind == "task" else event_ids
            if endpoint.ref_id not in known:
                report.error(
                    ERR_DANGLING_REF,
                    f"edge {i} references unknown {endpoint.kind} {endpoint.ref_id!r}",
                )
                endpoints_ok = False
        if not endpoints_ok:
            continue
        if edge.kind is EdgeKind.INVOCATION:
            if edge.source.kind != "task" or edge.target.kind != "task":
                report.error(ERR_INVALID_EDGE, f"invocation edge {i} endpoints must be tasks")
            else:
                invocation_pairs.append((edge.source.ref_id, edge.target.ref_id))
        else:
            if edge.source.kind != "event" or edge.target.kind != "event":
                report.error(
                    ERR_INVALID_EDGE, f"happened_before edge {i} endpoints must be events"
                )
            else:
                happened_pairs.append((edge.source.ref_id, edge.target.ref_id))

    if report.errors:
        return report

    if _has_cycle(task_ids, invocation_pairs):
        report.error(ERR_CYCLE, "invocation edges form a cycle at task granularity")
    if _has_cycle(event_ids, happened_pairs):
        report.error(ERR_CYCLE, "happened-before edges form a cycle at event granularity")
    if not report.errors:
        projected = invocation_pairs + [
            (event_owner[s], event_owner[t])
            for s, t in happened_pairs
            if event_owner[s] != event_owner[t]
        ]
        if _has_cycle(task_ids, projected):
            report.warn(
                WARN_TASK_CYCLE_VIA_EVENTS,
                "happened-before edges projected onto tasks form a task-level cycle",
            )
    return report


def _build_endpoint(raw, report: ValidationReport, where: str) -> EndpointRef | None:
    if not isinstance(raw, dict) or len(raw) != 1:
        report.error(ERR_SCHEMA, f"{where} must be an object with one of 'task'/'event'")
        return None
    key, value = next(iter(raw.items()))
    if key not in ("task", "event") or not isinstance(value, str):
        report.error(ERR_SCHEMA, f"{where} must map 'task' or 'event' to an id string")
        return None
    return EndpointRef(kind=key, ref_id=value)


def parse_trace(raw_document) -> tuple[Trace | None, ValidationReport]:
    """Parse one interchange document into a validated Trace.

    Accepts a JSON string/bytes or an already-decoded dict.  Returns
    ``(trace, report)``; the trace is ``None`` whenever the report carries
    errors.  Warnings never block.
    """
    report = ValidationReport()
    if isinstance(raw_document, (str, bytes, bytearray)):
        try:
            doc = json.loads(raw_document)
        except (json.JSONDecodeError, UnicodeDecodeError) as exc:
            report.error(ERR_PARSE, f"malformed JSON: {exc}")
            return None, report
    else:
        doc = raw_document
    if not isinstance(doc, dict):
        report.error(ERR_SCHEMA, "document root must be an object")
        return None, report

    trace_id = doc.get("trace_id")
    if not isinstance(trace_id, str):
        report.error(ERR_SCHEMA, "trace_id must be a string")
        return None, report

    raw_events = doc.get("events", [])
    raw_edges = doc.get("edges", [])
    if not isinstance(raw_events, list) or not isinstance(raw_edges, list):
        report.error(ERR_SCHEMA, "events and edges must be arrays")
        return None, report

    tasks: list[Task] = []
    events: list[Event] = []

    if "tasks" not in doc:
        # Event-only form: every event must carry process attribution.
        records = []
        for i, raw in enumerate(raw_events):
            if not isinstance(raw, dict):
                report.error(ERR_SCHEMA, f"events[{i}] must be an object")
                continue
            missing = [
                k
                for k in ("event_id", "label", "ts_us", "process_id")
                if k not in raw
            ]
            if missing:
                report.error(
                    ERR_SCHEMA, f"events[{i}] missing {missing} (event-only form)"
                )
                continue
            if not isinstance(raw["event_id"], str) or not isinstance(raw["label"], str):
                report.error(ERR_SCHEMA, f"events[{i}] ids and label must be strings")
                continue
            if not _is_int(raw["ts_us"]):
                report.error(ERR_SCHEMA, f"events[{i}].ts_us must be an integer")
                continue
            records.append(raw)
        if report.errors:
            return None, report
        tasks, events, warnings = derive_tasks(records)
        report.warnings.extend(warnings)
    else:
        raw_tasks = doc.get("tasks")
        if not isinstance(raw_tasks, list):
            report.error(ERR_SCHEMA, "tasks must be an array")
            return None, report
        for i, raw in enumerate(raw_tasks):
            if not isinstance(raw, dict):
                report.error(ERR_SCHEMA, f"tasks[{i}] must be an object")
                continue
            missing = [
                k
                for k in ("task_id", "task_type", "process_id", "start_us", "end_us")
                if k not in raw
            ]
            if missing:
                report.error(ERR_SCHEMA, f"tasks[{i}] missing {missing}")
                continue
            if not all(
                isinstance(raw[k], str) for k in ("task_id", "task_type", "process_id")
            ):
                report.error(ERR_SCHEMA, f"tasks[{i}] ids must be strings")
                continue
            if not (_is_int(raw["start_us"]) and _is_int(raw["end_us"])):
                report.error(ERR_SCHEMA, f"tasks[{i}] timestamps must be integers")
                continue
            thread_id = raw.get("thread_id")
            if thread_id is not None and not isinstance(thread_id, str):
                report.error(ERR_SCHEMA, f"tasks[{i}].thread_id must be a string")
                continue
            annotations = raw.get("annotations", {})
            if not isinstance(annotations, dict) or not all(
                isinstance(k, str) and isinstance(v, str) for k, v in annotations.items()
            ):
                report.error(ERR_SCHEMA, f"tasks[{i}].annotations must map strings to strings")
                continue
            tasks.append(
                Task(
                    task_id=raw["task_id"],
                    task_type=raw["task_type"],
                    process_id=raw["process_id"],
                    thread_id=thread_id,
                    start_ts=raw["start_us"],
                    end_ts=raw["end_us"],
                    annotations=dict(annotations),
                )
            )
        for i, raw in enumerate(raw_events):
            if not isinstance(raw, dict):
                report.error(ERR_SCHEMA, f"events[{i}] must be an object")
                continue
            missing = [k for k in ("event_id", "task_id", "label", "ts_us") if k not in raw]
            if missing:
                report.error(ERR_SCHEMA, f"events[{i}] missing {missing}")
                continue
            if not all(isinstance(raw[k], str) for k in ("event_id", "task_id", "label")):
                report.error(ERR_SCHEMA, f"events[{i}] ids and label must be strings")
                continue
            if not _is_int(raw["ts_us"]):
                report.error(ERR_SCHEMA, f"events[{i}].ts_us must be an integer")
                continue
            events.append(
                Event(
                    event_id=raw["event_id"],
                    task_id=raw["task_id"],
                    label=raw["label"],
                    timestamp=raw["ts_us"],
                )
            )

    edges: list[Edge] = []
    for i, raw in enumerate(raw_edges):
        if not isinstance(raw, dict) or "src" not in raw or "dst" not in raw:
            report.error(ERR_SCHEMA, f"edges[{i}] must carry src, dst, kind")
            continue
        source = _build_endpoint(raw["src"], report, f"edges[{i}].src")
        target = _build_endpoint(raw["dst"], report, f"edges[{i}].dst")
        kind_raw = raw.get("kind")
        try:
            kind = EdgeKind(kind_raw)
        except ValueError:
            report.error(ERR_SCHEMA, f"edges[{i}].kind must be invocation or happened_before")
            continue
        if source is None or target is None:
            continue
        edges.append(Edge(source=source, target=target, kind=kind))

    if report.errors:
        return None, report

    trace = Trace(trace_id=trace_id, tasks=tasks, events=events, edges=edges)
    semantic = validate_dag(trace)
    report.errors.extend(semantic.errors)
    report.warnings.extend(semantic.warnings)
    if report.errors:
        return None, report

    trace.start_ts = min(t.start_ts for t in tasks)
    trace.end_ts = max(t.end_ts for t in tasks)
    return trace, report


def critical_duration(trace: Trace) -> int:
    """Wall-clock extent of the whole trace in microseconds."""
    return trace.end_ts - trace.start_ts


def serialize_trace(trace: Trace) -> dict:
    """Emit the interchange document (task form) for a trace.

    Optional fields that are unset are omitted, so parse/serialize round-trips
    are stable.
    """
    tasks = []
    for task in trace.tasks:
        entry: dict = {
            "task_id": task.task_id,
            "task_type": task.task_type,
            "process_id": task.process_id,
            "start_us": task.start_ts,
            "end_us": task.end_ts,
        }
        if task.thread_id is not None:
            entry["thread_id"] = task.thread_id
        if task.annotations:
            entry["annotations"] = dict(task.annotations)
        tasks.append(entry)
    events = [
        {
            "event_id": e.event_id,
            "task_id": e.task_id,
            "label": e.label,
            "ts_us": e.timestamp,
        }
        for e in trace.events
    ]
    edges = [
        {
            "src": {edge.source.kind: edge.source.ref_id},
            "dst": {edge.target.kind: edge.target.ref_id},
            "kind": edge.kind.value,
        }
        for edge in trace.edges
    ]
    return {"trace_id": trace.trace_id, "tasks": tasks, "events": events, "edges": edges}


def canonical_trace_bytes(trace: Trace) -> bytes:
    """Canonical JSON encoding: sorted keys, no whitespace."""
    return json.dumps(
        serialize_trace(trace), sort_keys=True, separators=(",", ":")
    ).encode("utf-8")
