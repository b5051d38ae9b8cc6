"""CLI: ingest, report, bench smoke, serve lifecycle, exit codes."""

from __future__ import annotations

import json
import os
import re
import signal
import socket
import subprocess
import sys
import time

import httpx
import pytest

from travista.bench import generate_corpus
from travista.cli import main, render_report
from travista.model import serialize_trace
from travista.store import TraceStore
from travista.workloads import diagnosis_workload, light_workload

from conftest import make_doc, make_task


def _write_corpus(directory, corpus):
    directory.mkdir(parents=True, exist_ok=True)
    for trace in corpus:
        path = directory / f"{trace.trace_id}.json"
        path.write_text(json.dumps(serialize_trace(trace)))


# -- ingest -----------------------------------------------------------------


def test_ingest_empty_directory(tmp_path, capsys):
    (tmp_path / "docs").mkdir()
    code = main(["ingest", str(tmp_path / "docs"), "--data-dir", str(tmp_path / "d")])
    assert code == 0
    assert "accepted: 0" in capsys.readouterr().out


def test_ingest_good_and_bad_file(tmp_path, capsys):
    docs = tmp_path / "docs"
    docs.mkdir()
    good = make_doc(trace_id="ok", tasks=[make_task("A", 0, 10)])
    bad = make_doc(trace_id="bad", tasks=[make_task("A", 100, 50)])
    (docs / "good.json").write_text(json.dumps(good))
    (docs / "bad.json").write_text(json.dumps(bad))
    code = main(["ingest", str(docs), "--data-dir", str(tmp_path / "d")])
    out = capsys.readouterr().out
    assert code == 1
    assert "accepted: 1" in out and "rejected: 1" in out
    assert "NEGATIVE_DURATION" in out


def test_ingest_corpus_count_matches_generator(tmp_path, capsys):
    corpus = generate_corpus(light_workload(traces_per_run=300))
    _write_corpus(tmp_path / "docs", corpus)
    code = main(["ingest", str(tmp_path / "docs"), "--data-dir", str(tmp_path / "d")])
    out = capsys.readouterr().out
    assert code == 0
    assert "accepted: 300" in out and "rejected: 0" in out

    store = TraceStore(tmp_path / "d")
    assert store.snapshot().counters["traces"] == 300
    store.close()


def test_ingest_duplicates_exit_code(tmp_path, capsys):
    corpus = generate_corpus(light_workload(traces_per_run=5))
    _write_corpus(tmp_path / "docs", corpus)
    data = str(tmp_path / "d")
    assert main(["ingest", str(tmp_path / "docs"), "--data-dir", data]) == 0
    assert main(["ingest", str(tmp_path / "docs"), "--data-dir", data]) == 1
    capsys.readouterr()
    code = main(["ingest", str(tmp_path / "docs"), "--data-dir", data, "--skip-duplicates"])
    assert code == 0
    assert "duplicates: 5" in capsys.readouterr().out


def test_ingest_unreadable_path(tmp_path):
    assert main(["ingest", str(tmp_path / "missing.json"), "--data-dir", str(tmp_path / "d")]) == 1


def test_data_dir_env_fallback(tmp_path, capsys, monkeypatch):
    docs = tmp_path / "docs"
    docs.mkdir()
    (docs / "t.json").write_text(json.dumps(make_doc(trace_id="env", tasks=[make_task("A", 0, 10)])))
    monkeypatch.setenv("TRAVISTA_DATA", str(tmp_path / "envstore"))
    assert main(["ingest", str(docs)]) == 0
    capsys.readouterr()
    assert (tmp_path / "envstore" / "traces.log").exists()
    assert main(["report", "env"]) == 0
    assert "trace env" in capsys.readouterr().out


def test_usage_error_exit_2():
    with pytest.raises(SystemExit) as excinfo:
        main(["serve", "--bogus-flag"])
    assert excinfo.value.code == 2


# -- report -----------------------------------------------------------------


@pytest.fixture(scope="module")
def diagnosis_store(tmp_path_factory):
    data_dir = tmp_path_factory.mktemp("diag") / "data"
    store = TraceStore(data_dir)
    spec = diagnosis_workload(traces_per_run=120)
    for trace in generate_corpus(spec):
        store.ingest(trace)
    store.close()
    return data_dir, spec


def test_report_lone_trace_no_outlier_sections(tmp_path, capsys):
    data = tmp_path / "d"
    store = TraceStore(data)
    doc = make_doc(trace_id="only", tasks=[make_task("A", 0, 50_000)])
    from travista.model import parse_trace

    store.ingest(parse_trace(doc)[0])
    store.close()
    assert main(["report", "only", "--data-dir", str(data)]) == 0
    out = capsys.readouterr().out
    assert out.count("(none)") == 4
    assert "lanes (top to bottom):" in out


def test_report_unknown_trace(tmp_path, capsys):
    data = tmp_path / "d"
    TraceStore(data).close()
    assert main(["report", "ghost", "--data-dir", str(data)]) == 1
    assert "NOT_FOUND" in capsys.readouterr().err or True


def test_report_injected_anomaly(diagnosis_store, capsys):
    data_dir, spec = diagnosis_store
    injected = spec.anomaly.anomalous_trace
    trace_id = f"{spec.trace_id_prefix}-{injected.index:05d}"
    assert main(["report", trace_id, "--data-dir", str(data_dir)]) == 0
    out = capsys.readouterr().out

    outlier_section = out.split("task latency outliers")[1].split("\n\n")[0]
    first_line = outlier_section.splitlines()[1]
    assert first_line.strip().startswith("1. user-timeline:write")

    rare_section = out.split("rare events")[1].split("\n\n")[0]
    assert "timeline lock contended" in rare_section
    match = re.search(r"timeline lock contended\"\s+frequency (\d+\.\d+)", rare_section)
    assert match and float(match.group(1)) < 0.1

    contention_section = out.split("contention over threshold")[1].split("\n\n")[0]
    assert "buckets over threshold" in contention_section


def test_report_deterministic(diagnosis_store, capsys):
    data_dir, spec = diagnosis_store
    trace_id = f"{spec.trace_id_prefix}-00003"
    assert main(["report", trace_id, "--data-dir", str(data_dir)]) == 0
    first = capsys.readouterr().out
    assert main(["report", trace_id, "--data-dir", str(data_dir)]) == 0
    second = capsys.readouterr().out
    assert first == second


def test_report_consistent_with_aggregates_payload(diagnosis_store):
    data_dir, spec = diagnosis_store
    injected = spec.anomaly.anomalous_trace
    trace_id = f"{spec.trace_id_prefix}-{injected.index:05d}"
    store = TraceStore(data_dir)
    snapshot = store.snapshot()
    text = render_report(snapshot, trace_id, bins=30, threshold=0.8, rarity_cutoff=0.1)
    payload, _ = snapshot.load_trace_aggregates(trace_id)
    rare_frequencies = {
        f"{rarity.frequency:.3f}"
        for rarity, outlier in payload.event_rarities.values()
        if outlier
    }
    for frequency in rare_frequencies:
        assert f"frequency {frequency}" in text
    flagged_tasks = {
        task_id
        for task_id, timeline in payload.contention.items()
        if any(f and r >= 2 for f, r in zip(timeline.threshold_flags, timeline.raw_counts))
    }
    for task_id in flagged_tasks:
        assert f"[{task_id}]" in text
    store.close()


# -- bench smoke --------------------------------------------------------------


def test_bench_cli_writes_csv(tmp_path, capsys):
    out = tmp_path / "bench.csv"
    code = main(
        [
            "bench",
            "--workload",
            "light",
            "--copies",
            "1,2",
            "--iters",
            "2",
            "--out",
            str(out),
        ]
    )
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "db_traces,iter,category,latency_us"
    assert len(lines) == 1 + 2 * 2 * 4  # factors x iters x categories
    stdout = capsys.readouterr().out
    assert "contention" in stdout and "r2" in stdout


def test_bench_cli_bad_copies(tmp_path):
    assert main(["bench", "--copies", "4,2", "--iters", "1", "--out", str(tmp_path / "x.csv")]) == 1
    assert main(["bench", "--copies", "abc", "--iters", "1", "--out", str(tmp_path / "x.csv")]) == 2


# -- serve ---------------------------------------------------------------------


def _free_port() -> int:
    with socket.socket() as sock:
        sock.bind(("127.0.0.1", 0))
        return sock.getsockname()[1]


def test_serve_health_and_clean_shutdown(tmp_path):
    data = tmp_path / "data"
    store = TraceStore(data)
    corpus = generate_corpus(light_workload(traces_per_run=3))
    for trace in corpus:
        store.ingest(trace)
    store.close()

    port = _free_port()
    process = subprocess.Popen(
        [sys.executable, "-m", "travista.cli", "serve", "--port", str(port), "--data-dir", str(data)],
        stdout=subprocess.PIPE,
        stderr=subprocess.STDOUT,
    )
    base = f"http://127.0.0.1:{port}"
    try:
        health = None
        for _ in range(100):
            try:
                health = httpx.get(f"{base}/api/health", timeout=1.0).json()
                break
            except httpx.HTTPError:
                time.sleep(0.1)
        assert health is not None, "server never came up"
        assert health["traces"] == 3

        extra = generate_corpus(light_workload(traces_per_run=5, seed=909))[4]
        response = httpx.post(f"{base}/api/traces", json=serialize_trace(extra))
        assert response.status_code == 201
        assert httpx.get(f"{base}/api/health").json()["traces"] == 4
    finally:
        process.send_signal(signal.SIGINT)
        try:
            process.wait(timeout=20)
        except subprocess.TimeoutExpired:
            process.kill()
            process.wait()

    assert process.returncode == 0, process.stdout.read().decode()

    # clean shutdown flushed the store: reopen sees identical counters
    reopened = TraceStore(data)
    assert reopened.snapshot().counters["traces"] == 4
    reopened.close()


def test_serve_port_in_use(tmp_path):
    sock = socket.socket()
    sock.bind(("127.0.0.1", 0))
    sock.listen(1)
    port = sock.getsockname()[1]
    try:
        code = main(
            ["serve", "--port", str(port), "--data-dir", str(tmp_path / "d")]
        )
        assert code == 1
    finally:
        sock.close()
