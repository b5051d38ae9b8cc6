"""Trace-analysis service for diagnosing single-request performance anomalies."""

from .aggregation import (
    ContentionTimeline,
    EdgeFrequency,
    EventRarity,
    FeatureSet,
    Histogram,
    build_histogram,
    contention_timeline,
    contention_timelines,
    edge_frequency,
    event_rarity,
    extract_features,
)
from .model import (
    Edge,
    EdgeKind,
    EndpointRef,
    Event,
    Task,
    Trace,
    ValidationReport,
    critical_duration,
    derive_tasks,
    normalize_label,
    parse_trace,
    serialize_trace,
    validate_dag,
)
from .store import (
    IngestReceipt,
    StoreSnapshot,
    TimingBreakdown,
    TraceAggregatesPayload,
    TraceStore,
    TraceSummary,
)

__version__ = "0.1.0"

__all__ = [
    "ContentionTimeline",
    "Edge",
    "EdgeFrequency",
    "EdgeKind",
    "EndpointRef",
    "Event",
    "EventRarity",
    "FeatureSet",
    "Histogram",
    "IngestReceipt",
    "StoreSnapshot",
    "Task",
    "TimingBreakdown",
    "Trace",
    "TraceAggregatesPayload",
    "TraceStore",
    "TraceSummary",
    "ValidationReport",
    "build_histogram",
    "contention_timeline",
    "contention_timelines",
    "critical_duration",
    "derive_tasks",
    "edge_frequency",
    "event_rarity",
    "extract_features",
    "normalize_label",
    "parse_trace",
    "serialize_trace",
    "validate_dag",
]
