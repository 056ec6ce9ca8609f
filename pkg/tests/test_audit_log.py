from __future__ import annotations

import json
import threading

import pytest

from affectfuse.audit.canonical import canonicalize
from affectfuse.audit.log import AuditLog, AuditWriteError, append_audit_log, read_event_line


def test_first_append_is_line_one(tmp_path):
    path = tmp_path / "events.jsonl"
    assert append_audit_log(canonicalize({"n": 1}), str(path)) == 1


def test_sequential_appends_preserve_order(tmp_path):
    path = tmp_path / "events.jsonl"
    with AuditLog(str(path)) as log:
        for n in range(1, 21):
            assert log.append(canonicalize({"n": n})) == n
    lines = path.read_bytes().splitlines()
    assert [json.loads(line)["n"] for line in lines] == list(range(1, 21))


def test_line_count_resumes_on_reopen(tmp_path):
    path = tmp_path / "events.jsonl"
    append_audit_log(canonicalize({"n": 1}), str(path))
    assert append_audit_log(canonicalize({"n": 2}), str(path)) == 2


def test_newline_in_payload_rejected(tmp_path):
    with AuditLog(str(tmp_path / "e.jsonl")) as log:
        with pytest.raises(AuditWriteError):
            log.append(b'{"a":\n1}')


def test_concurrent_appends_never_tear(tmp_path):
    path = tmp_path / "events.jsonl"
    per_worker = 200
    with AuditLog(str(path)) as log:
        def work(worker):
            for i in range(per_worker):
                log.append(canonicalize({"worker": worker, "i": i, "pad": "x" * 64}))

        threads = [threading.Thread(target=work, args=(w,)) for w in range(8)]
        for thread in threads:
            thread.start()
        for thread in threads:
            thread.join()
    lines = path.read_bytes().splitlines()
    assert len(lines) == 8 * per_worker
    seen = set()
    for line in lines:
        record = json.loads(line)  # would fail on a torn line
        seen.add((record["worker"], record["i"]))
    assert len(seen) == 8 * per_worker


def test_unwritable_path_fatal(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(AuditWriteError):
        AuditLog(str(blocker / "events.jsonl"))


def test_read_event_line(tmp_path):
    path = tmp_path / "events.jsonl"
    first = canonicalize({"n": 1})
    second = canonicalize({"n": 2})
    with AuditLog(str(path)) as log:
        log.append(first)
        log.append(second)
    assert read_event_line(str(path), 1) == first
    assert read_event_line(str(path), 2) == second
    with pytest.raises(AuditWriteError):
        read_event_line(str(path), 3)
