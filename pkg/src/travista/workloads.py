"""Canned synthetic workloads.

``default_workload`` models a social-network compose-post flow: a front end
fans out through a compose service to id generation, text processing, post
storage, and timeline writes backed by a redis-style cache.  Sizing aims at
roughly 7 tasks and 100 events per trace.  The same topology ships as
``workloads/compose_post.json`` for the CLI's ``--spec`` flag.

``contention_stress_workload`` trades event volume for long, densely
overlapping tasks so contention queries dominate load latency.

``light_workload`` keeps everything small for quick experiments and tests.
"""

from __future__ import annotations

from .bench import (
    AnomalousTraceSpec,
    AnomalySpec,
    CallSpec,
    EventSpec,
    LatencyOutlierSpec,
    RareEdgeSpec,
    RareEventSpec,
    ServiceSpec,
    WorkloadSpec,
)

_COMMON_OPS = [
    ("request received", 1.0),
    ("args validated", 0.93),
    ("connection acquired", 0.93),
    ("handler dispatched", 0.93),
    ("payload decoded", 0.93),
    ("lock acquired", 0.93),
    ("lock released", 0.93),
    ("response serialized", 0.93),
    ("connection released", 0.93),
    ("metrics updated", 0.93),
    ("log flushed", 0.93),
    ("response sent", 0.93),
    ("cache lookup", 0.7),
    ("cache hit", 0.55),
    ("worker pool size <*>", 0.5),
    ("gc pause <*>", 0.35),
]


def _events(*extra: tuple[str, float]) -> list[EventSpec]:
    return [EventSpec(label, p) for label, p in list(_COMMON_OPS) + list(extra)]


def default_workload(
    traces_per_run: int = 500, seed: int = 42, anomaly: AnomalySpec | None = None
) -> WorkloadSpec:
    services = [
        ServiceSpec(
            task_type="frontend:compose-post",
            process_id="frontend-0",
            median_latency_us=2500,
            latency_sigma=0.3,
            events=_events(("route matched", 0.9)),
            calls=[CallSpec("compose-post:compose", 1.0)],
        ),
        ServiceSpec(
            task_type="compose-post:compose",
            process_id="compose-0",
            median_latency_us=1800,
            latency_sigma=0.35,
            events=_events(("assemble post <*>", 0.9)),
            calls=[
                CallSpec("unique-id:generate", 1.0),
                CallSpec("text:process", 1.0),
                CallSpec("post-storage:store", 1.0),
                CallSpec("user-timeline:write", 1.0),
            ],
        ),
        ServiceSpec(
            task_type="unique-id:generate",
            process_id="unique-id-0",
            median_latency_us=350,
            latency_sigma=0.3,
            events=_events(("id minted <*>", 0.95)),
            calls=[],
        ),
        ServiceSpec(
            task_type="text:process",
            process_id="text-0",
            median_latency_us=1200,
            latency_sigma=0.4,
            events=_events(("mentions resolved <*>", 0.6)),
            calls=[CallSpec("url-shorten:shorten", 0.5)],
        ),
        ServiceSpec(
            task_type="url-shorten:shorten",
            process_id="url-shorten-0",
            median_latency_us=900,
            latency_sigma=0.4,
            events=_events(("short url issued", 0.95)),
            calls=[],
        ),
        ServiceSpec(
            task_type="post-storage:store",
            process_id="post-storage-0",
            median_latency_us=2200,
            latency_sigma=0.45,
            events=_events(("row committed", 0.95)),
            calls=[],
        ),
        ServiceSpec(
            task_type="user-timeline:write",
            process_id="user-timeline-0",
            median_latency_us=1500,
            latency_sigma=0.4,
            events=_events(("timeline appended", 0.95)),
            calls=[CallSpec("redis:update-timeline", 1.0)],
        ),
        ServiceSpec(
            task_type="redis:update-timeline",
            process_id="redis-0",
            median_latency_us=1100,
            latency_sigma=0.5,
            events=_events(("redis update", 0.95)),
            calls=[],
        ),
        ServiceSpec(
            task_type="debug-cache:inspect",
            process_id="redis-0",
            median_latency_us=600,
            latency_sigma=0.3,
            events=_events(("cache dump <*>", 0.9)),
            calls=[],
        ),
    ]
    spec = WorkloadSpec(
        root="frontend:compose-post",
        services=services,
        traces_per_run=traces_per_run,
        seed=seed,
        arrival_gap_us=50_000,
        anomaly=anomaly or AnomalySpec(),
    )
    spec.validate()
    return spec


def diagnosis_workload(traces_per_run: int = 400, seed: int = 411) -> WorkloadSpec:
    """Default topology with one fully injected anomalous trace:

    * the ``user-timeline:write`` task runs 10x slow,
    * it carries a ~5% rare event label,
    * a burst of re-timed traces piles onto its processes.
    """
    anomaly = AnomalySpec(
        rare_event=RareEventSpec(
            task_type="user-timeline:write",
            label="timeline lock contended",
            rate=0.05,
        ),
        rare_edge=RareEdgeSpec(
            parent_type="compose-post:compose",
            child_type="debug-cache:inspect",
            rate=0.05,
        ),
        latency_outlier=LatencyOutlierSpec(
            task_type="post-storage:store", rate=0.01, multiplier=4.0
        ),
        anomalous_trace=AnomalousTraceSpec(
            index=traces_per_run // 2,
            task_type="user-timeline:write",
            latency_multiplier=10.0,
            rare_event_label="timeline lock contended",
            burst_traces=8,
        ),
    )
    return default_workload(traces_per_run=traces_per_run, seed=seed, anomaly=anomaly)


def contention_stress_workload(traces_per_run: int = 150, seed: int = 7) -> WorkloadSpec:
    """Long overlapping tasks, few events: contention-bound loads."""
    services = [
        ServiceSpec(
            task_type="web:request",
            process_id="web-0",
            median_latency_us=60_000,
            latency_sigma=0.3,
            events=[EventSpec("request received", 0.8), EventSpec("response sent", 0.8)],
            calls=[CallSpec("app:handle", 1.0)],
        ),
        ServiceSpec(
            task_type="app:handle",
            process_id="app-0",
            median_latency_us=120_000,
            latency_sigma=0.35,
            events=[EventSpec("handler dispatched", 0.8), EventSpec("work complete", 0.8)],
            calls=[CallSpec("db:query", 0.9), CallSpec("cache:get", 0.9)],
        ),
        ServiceSpec(
            task_type="db:query",
            process_id="db-0",
            median_latency_us=90_000,
            latency_sigma=0.4,
            events=[EventSpec("rows scanned <*>", 0.8), EventSpec("txn committed", 0.8)],
            calls=[],
        ),
        ServiceSpec(
            task_type="cache:get",
            process_id="cache-0",
            median_latency_us=40_000,
            latency_sigma=0.4,
            events=[EventSpec("cache lookup", 0.8), EventSpec("cache hit", 0.6)],
            calls=[],
        ),
    ]
    spec = WorkloadSpec(
        root="web:request",
        services=services,
        traces_per_run=traces_per_run,
        seed=seed,
        arrival_gap_us=5_000,
        trace_id_prefix="stress",
    )
    spec.validate()
    return spec


def light_workload(traces_per_run: int = 100, seed: int = 5) -> WorkloadSpec:
    """Small corpus with moderate overlap; quick to generate and ingest."""
    services = [
        ServiceSpec(
            task_type="gateway:route",
            process_id="gw-0",
            median_latency_us=6_000,
            latency_sigma=0.3,
            events=[
                EventSpec("request received", 0.8),
                EventSpec("route matched", 0.8),
                EventSpec("response sent", 0.8),
            ],
            calls=[CallSpec("auth:check", 0.9), CallSpec("api:serve", 1.0)],
        ),
        ServiceSpec(
            task_type="auth:check",
            process_id="auth-0",
            median_latency_us=2_500,
            latency_sigma=0.35,
            events=[
                EventSpec("token parsed", 0.8),
                EventSpec("session ok", 0.7),
                EventSpec("acl evaluated", 0.6),
            ],
            calls=[],
        ),
        ServiceSpec(
            task_type="api:serve",
            process_id="api-0",
            median_latency_us=9_000,
            latency_sigma=0.4,
            events=[
                EventSpec("handler dispatched", 0.8),
                EventSpec("payload decoded", 0.8),
                EventSpec("response serialized", 0.8),
            ],
            calls=[CallSpec("db:read", 0.85)],
        ),
        ServiceSpec(
            task_type="db:read",
            process_id="db-0",
            median_latency_us=7_000,
            latency_sigma=0.45,
            events=[
                EventSpec("rows scanned <*>", 0.8),
                EventSpec("buffer hit", 0.7),
                EventSpec("txn committed", 0.8),
            ],
            calls=[],
        ),
    ]
    spec = WorkloadSpec(
        root="gateway:route",
        services=services,
        traces_per_run=traces_per_run,
        seed=seed,
        arrival_gap_us=10_000,
        trace_id_prefix="light",
    )
    spec.validate()
    return spec
