"""Shared builders, strategies, and fake views for the test suite."""

from __future__ import annotations

import random

from hypothesis import strategies as st

from travista.model import parse_trace

TASK_TYPES = ["svc-a:op", "svc-b:op", "svc-c:get", "svc-d:put"]
PROCESSES = ["p0", "p1", "p2"]
LABELS = ["cache lookup", "retry 3", "write done", "queue push"]


def make_doc(trace_id="tr1", tasks=None, events=None, edges=None):
    return {
        "trace_id": trace_id,
        "tasks": tasks if tasks is not None else [],
        "events": events if events is not None else [],
        "edges": edges if edges is not None else [],
    }


def make_task(task_id, start, end, task_type="svc-a:op", process_id="p0", **extra):
    entry = {
        "task_id": task_id,
        "task_type": task_type,
        "process_id": process_id,
        "start_us": start,
        "end_us": end,
    }
    entry.update(extra)
    return entry


def make_event(event_id, task_id, ts, label="cache lookup"):
    return {"event_id": event_id, "task_id": task_id, "label": label, "ts_us": ts}


def task_edge(src, dst):
    return {"src": {"task": src}, "dst": {"task": dst}, "kind": "invocation"}


def event_edge(src, dst):
    return {"src": {"event": src}, "dst": {"event": dst}, "kind": "happened_before"}


@st.composite
def trace_documents(draw):
    """Valid span-form interchange documents: tree-shaped invocation edges,
    events inside their task windows, forward-only happened-before edges."""
    n_tasks = draw(st.integers(min_value=1, max_value=6))
    base = draw(st.integers(min_value=0, max_value=10**9)) * 1000
    tasks = []
    for i in range(n_tasks):
        start = base + draw(st.integers(min_value=0, max_value=100_000))
        duration = draw(st.integers(min_value=0, max_value=50_000))
        entry = make_task(
            f"t{i}",
            start,
            start + duration,
            task_type=draw(st.sampled_from(TASK_TYPES)),
            process_id=draw(st.sampled_from(PROCESSES)),
        )
        if draw(st.booleans()):
            entry["thread_id"] = f"w{draw(st.integers(min_value=0, max_value=3))}"
        if draw(st.booleans()):
            entry["annotations"] = {"k": draw(st.sampled_from(["v", "w"]))}
        tasks.append(entry)

    edges = []
    for i in range(1, n_tasks):
        if draw(st.booleans()):
            parent = draw(st.integers(min_value=0, max_value=i - 1))
            edges.append(task_edge(f"t{parent}", f"t{i}"))

    events = []
    for i, task in enumerate(tasks):
        for j in range(draw(st.integers(min_value=0, max_value=3))):
            ts = draw(st.integers(min_value=task["start_us"], max_value=task["end_us"]))
            events.append(
                make_event(f"e{i}_{j}", f"t{i}", ts, label=draw(st.sampled_from(LABELS)))
            )

    if len(events) >= 2:
        for _ in range(draw(st.integers(min_value=0, max_value=2))):
            a = draw(st.integers(min_value=0, max_value=len(events) - 2))
            b = draw(st.integers(min_value=a + 1, max_value=len(events) - 1))
            edges.append(event_edge(events[a]["event_id"], events[b]["event_id"]))

    trace_id = f"trace-{draw(st.integers(min_value=0, max_value=10**6))}"
    return make_doc(trace_id=trace_id, tasks=tasks, events=events, edges=edges)


def random_corpus_docs(n_traces, seed=7, n_types=4, n_processes=3, labels=LABELS):
    """Deterministic random corpus of small span-form documents."""
    rng = random.Random(seed)
    docs = []
    for t in range(n_traces):
        n_tasks = rng.randint(1, 5)
        base = t * 1_000_000
        tasks = []
        for i in range(n_tasks):
            start = base + rng.randint(0, 200_000)
            tasks.append(
                make_task(
                    f"t{i}",
                    start,
                    start + rng.randint(0, 80_000),
                    task_type=f"svc{rng.randrange(n_types)}:op",
                    process_id=f"p{rng.randrange(n_processes)}",
                )
            )
        events = []
        for i, task in enumerate(tasks):
            for j in range(rng.randint(0, 4)):
                events.append(
                    make_event(
                        f"e{i}_{j}",
                        f"t{i}",
                        rng.randint(task["start_us"], task["end_us"]),
                        label=rng.choice(labels),
                    )
                )
        edges = [
            task_edge(f"t{rng.randrange(i)}", f"t{i}")
            for i in range(1, n_tasks)
            if rng.random() < 0.7
        ]
        docs.append(make_doc(trace_id=f"corpus-{t}", tasks=tasks, events=events, edges=edges))
    return docs


def parse_all(docs):
    traces = []
    for doc in docs:
        trace, report = parse_trace(doc)
        assert trace is not None, report.errors
        traces.append(trace)
    return traces


class FakeView:
    """Dict-backed stand-in for a store snapshot in aggregation tests."""

    def __init__(self, counts=None, samples=None, presence=None, invocations=None, activity=None):
        self.counts = counts or {}
        self.samples = samples or {}
        self.presence = presence or {}
        self.invocations = invocations or {}
        self.activity = activity or {}

    def has_type(self, task_type):
        return self.counts.get(task_type, 0) > 0

    def instance_count(self, task_type):
        return self.counts.get(task_type, 0)

    def latency_samples(self, task_type):
        return self.samples.get(task_type, [])

    def event_presence_count(self, task_type, label):
        return self.presence.get((task_type, label), 0)

    def invocation_presence_count(self, parent_type, child_type):
        return self.invocations.get((parent_type, child_type), 0)

    def has_process(self, process_id):
        return process_id in self.activity

    def activity_overlapping(self, process_id, start_us, end_us):
        return [
            row
            for row in self.activity.get(process_id, [])
            if row[0] <= end_us and row[1] >= start_us
        ]


def view_from_traces(traces):
    """Accumulate per-trace features into a FakeView, bypassing the store."""
    from travista.aggregation import extract_features

    view = FakeView()
    for trace in traces:
        features = extract_features(trace)
        for task_type, samples in features.latency_samples.items():
            view.counts[task_type] = view.counts.get(task_type, 0) + len(samples)
            view.samples.setdefault(task_type, []).extend(samples)
        for task_type, labels in features.event_occurrences.items():
            for label, task_ids in labels.items():
                key = (task_type, label)
                view.presence[key] = view.presence.get(key, 0) + len(task_ids)
        for parent, children in features.invocation_pairs.items():
            for child, parent_ids in children.items():
                key = (parent, child)
                view.invocations[key] = view.invocations.get(key, 0) + len(parent_ids)
        for process, intervals in features.activity_intervals.items():
            view.activity.setdefault(process, []).extend(intervals)
    return view
