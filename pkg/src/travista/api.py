"""HTTP service: trace ingestion plus the batched single-trace-view query.

All endpoints speak JSON.  Error bodies always carry a machine-readable
``code``.  The service performs no aggregation arithmetic of its own: every
number in a response comes from one store snapshot per request.

Routes:
    POST /api/traces                        ingest one interchange document
    GET  /api/traces?offset&limit&order     paginated summaries
    GET  /api/trace/{id}                    canonical stored document
    GET  /api/trace/{id}/aggregates         trace + histograms + rarities +
                                            edge frequencies + contention
    GET  /api/tasktype/{name}/histogram     distribution without a highlight
    GET  /api/health                        build info and store counters
"""

from __future__ import annotations

import json
from time import perf_counter_ns

from fastapi import FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from . import __version__, aggregation
from .aggregation import build_histogram
from .errors import DuplicateTrace, NoSamples, TraceNotFound
from .model import parse_trace, serialize_trace
from .store import TraceAggregatesPayload, TraceStore

DEFAULT_PORT = 8714
DEFAULT_MAX_BODY_MB = 64
MAX_BINS = 200


def _error(status: int, code: str, message: str, **extra) -> JSONResponse:
    body = {"code": code, "message": message}
    body.update(extra)
    return JSONResponse(status_code=status, content=body)


def payload_to_dict(payload: TraceAggregatesPayload) -> dict:
    """Wire form of the aggregates payload; documented in the README."""
    return {
        "trace_id": payload.trace.trace_id,
        "trace": serialize_trace(payload.trace),
        "lane_order": payload.lane_order,
        "histograms": [
            {"task_id": task_id, **hist.to_dict()}
            for task_id, hist in zip(payload.lane_order, payload.histograms)
        ],
        "event_rarities": {
            event_id: {**rarity.to_dict(), "outlier": outlier}
            for event_id, (rarity, outlier) in payload.event_rarities.items()
        },
        "edge_frequencies": {
            str(index): {**frequency.to_dict(), "outlier": outlier}
            for index, (frequency, outlier) in payload.edge_frequencies.items()
        },
        "contention": {
            task_id: timeline.to_dict()
            for task_id, timeline in payload.contention.items()
        },
        "timings": payload.timings.to_dict(),
        "params": payload.params,
    }


def create_app(
    store: TraceStore,
    max_body_mb: int = DEFAULT_MAX_BODY_MB,
    ui_origin: str = "*",
) -> FastAPI:
    app = FastAPI(title="travista", version=__version__)
    app.state.store = store
    max_body_bytes = max_body_mb * 1024 * 1024

    app.add_middleware(
        CORSMiddleware,
        allow_origins=[ui_origin],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(RequestValidationError)
    async def validation_handler(request: Request, exc: RequestValidationError):
        return _error(400, "INVALID_PARAMETER", str(exc.errors()[:3]))

    @app.post("/api/traces", status_code=201)
    async def ingest_trace(request: Request):
        body = await request.body()
        if len(body) > max_body_bytes:
            return _error(413, "BODY_TOO_LARGE", f"body exceeds {max_body_mb} MiB")
        trace, report = parse_trace(body)
        if trace is None:
            return JSONResponse(status_code=400, content=report.to_dict())
        try:
            receipt = store.ingest(trace)
        except DuplicateTrace as exc:
            return _error(409, exc.code, exc.message)
        return {
            "trace_id": receipt.trace_id,
            "preprocessing_us": receipt.preprocessing_us,
            "warnings": report.to_dict()["warnings"],
        }

    @app.get("/api/traces")
    def list_traces(offset: int = 0, limit: int = 100, order: str = "start_ts"):
        try:
            summaries = store.list_traces(offset=offset, limit=limit, order=order)
        except ValueError as exc:
            return _error(400, "INVALID_PARAMETER", str(exc))
        return {"traces": [s.to_dict() for s in summaries]}

    @app.get("/api/trace/{trace_id}")
    def get_trace(trace_id: str):
        try:
            raw = store.get_trace_bytes(trace_id)
        except TraceNotFound as exc:
            return _error(404, exc.code, exc.message)
        return Response(content=raw, media_type="application/json")

    @app.get("/api/trace/{trace_id}/aggregates")
    def get_aggregates(
        trace_id: str,
        bins: int = aggregation.DEFAULT_BINS,
        threshold: float = aggregation.DEFAULT_THRESHOLD,
        rarity_cutoff: float = aggregation.DEFAULT_RARITY_CUTOFF,
    ):
        if not 1 <= bins <= MAX_BINS:
            return _error(400, "INVALID_PARAMETER", f"bins must be in [1, {MAX_BINS}]")
        if not 0 < threshold <= 1:
            return _error(400, "INVALID_PARAMETER", "threshold must be in (0, 1]")
        if not 0 <= rarity_cutoff <= 1:
            return _error(400, "INVALID_PARAMETER", "rarity_cutoff must be in [0, 1]")
        try:
            payload, _ = store.load_trace_aggregates(
                trace_id, bins=bins, threshold=threshold, rarity_cutoff=rarity_cutoff
            )
        except TraceNotFound as exc:
            return _error(404, exc.code, exc.message)
        t0 = perf_counter_ns()
        content = payload_to_dict(payload)
        body = json.dumps(content, separators=(",", ":"))
        serialize_us = (perf_counter_ns() - t0) / 1000.0
        # splice response metadata in without re-serializing the whole payload
        body = body[:-1] + f',"meta":{{"serialize_us":{serialize_us}}}}}'
        return Response(content=body, media_type="application/json")

    @app.get("/api/tasktype/{name}/histogram")
    def tasktype_histogram(name: str, bins: int = aggregation.DEFAULT_BINS):
        if not 1 <= bins <= MAX_BINS:
            return _error(400, "INVALID_PARAMETER", f"bins must be in [1, {MAX_BINS}]")
        snapshot = store.snapshot()
        if not snapshot.has_type(name):
            return _error(404, "UNKNOWN_TYPE", f"no instances of task type {name!r}")
        try:
            hist = build_histogram(snapshot.latency_samples(name), bins, task_type=name)
        except NoSamples as exc:
            return _error(404, exc.code, exc.message)
        return hist.to_dict()

    @app.get("/api/health")
    def health():
        return {"name": "travista", "version": __version__, **store.health()}

    return app
