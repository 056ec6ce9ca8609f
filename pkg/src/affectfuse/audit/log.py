"""Append-only JSONL audit log.

One canonical event per line. Appends are serialized through a lock and
written with a single O_APPEND write so concurrent writers never tear or
interleave lines. A failed append is fatal for the turn: an inference that
cannot be audited must not return silently.
"""

from __future__ import annotations

import os
import threading
from pathlib import Path


class AuditWriteError(OSError):
    """The audit log could not be appended to."""


def _count_lines(path: Path) -> int:
    if not path.exists():
        return 0
    lines = 0
    with open(path, "rb") as handle:
        while True:
            chunk = handle.read(1 << 20)
            if not chunk:
                break
            lines += chunk.count(b"\n")
    return lines


class AuditLog:
    """Single-writer append handle for one JSONL file."""

    def __init__(self, path: str) -> None:
        self.path = Path(path)
        self._lock = threading.Lock()
        try:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            self._lines = _count_lines(self.path)
            self._fd = os.open(self.path, os.O_APPEND | os.O_CREAT | os.O_WRONLY, 0o644)
        except OSError as exc:
            raise AuditWriteError(f"cannot open audit log {self.path}: {exc}") from exc

    def append(self, canonical_bytes: bytes) -> int:
        """Append one canonical event and return its 1-based line number."""
        if b"\n" in canonical_bytes:
            raise AuditWriteError("canonical event bytes must not contain newlines")
        line = canonical_bytes + b"\n"
        with self._lock:
            try:
                written = os.write(self._fd, line)
            except OSError as exc:
                raise AuditWriteError(f"append to {self.path} failed: {exc}") from exc
            if written != len(line):
                raise AuditWriteError(f"short write to {self.path}")
            self._lines += 1
            return self._lines

    def close(self) -> None:
        try:
            os.close(self._fd)
        except OSError:
            pass

    def __enter__(self) -> "AuditLog":
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()


def append_audit_log(canonical_bytes: bytes, log_path: str) -> int:
    """One-shot append; prefer a long-lived AuditLog for hot paths."""
    log = AuditLog(log_path)
    try:
        return log.append(canonical_bytes)
    finally:
        log.close()


def read_event_line(log_path: str, line_number: int) -> bytes:
    """Return the exact bytes of one event line (without the newline)."""
    with open(log_path, "rb") as handle:
        for current, line in enumerate(handle, start=1):
            if current == line_number:
                return line.rstrip(b"\n")
    raise AuditWriteError(f"{log_path} has no line {line_number}")
