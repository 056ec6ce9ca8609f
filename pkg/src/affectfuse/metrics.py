"""Prometheus instrumentation (text exposition format 0.0.4).

A small self-contained registry: counters, gauges, and histograms, every
series labeled with model_size and run_id for cohort analysis. The registry
is safe for concurrent updates; exposition can be served over HTTP or dumped
to a file.
"""

from __future__ import annotations

import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

DEFAULT_BUCKETS: Tuple[float, ...] = (
    0.001, 0.0025, 0.005, 0.01, 0.025, 0.05, 0.1, 0.25, 0.5, 1.0, 2.5,
)


def _format_value(value: float) -> str:
    if value == int(value) and abs(value) < 1e15:
        return str(int(value))
    return repr(value)


def _format_labels(labels: Mapping[str, str]) -> str:
    # "le" sorts last so histogram bucket lines read naturally.
    keys = sorted(labels, key=lambda k: (k == "le", k))
    return "{" + ",".join(f'{k}="{labels[k]}"' for k in keys) + "}"


class _Metric:
    kind = "untyped"

    def __init__(self, name: str, help_text: str, base_labels: Mapping[str, str]) -> None:
        self.name = name
        self.help = help_text
        self.base_labels = dict(base_labels)
        self._lock = threading.Lock()

    def _merge(self, labels: Mapping[str, str]) -> Tuple[Tuple[str, str], ...]:
        merged = dict(self.base_labels)
        merged.update({k: str(v) for k, v in labels.items()})
        return tuple(sorted(merged.items()))

    def render(self) -> List[str]:
        raise NotImplementedError


class Counter(_Metric):
    kind = "counter"

    def __init__(self, name, help_text, base_labels) -> None:
        super().__init__(name, help_text, base_labels)
        self._values: Dict[Tuple[Tuple[str, str], ...], float] = {}

    def inc(self, amount: float = 1.0, **labels: str) -> None:
        if amount < 0:
            raise ValueError("counters only go up")
        key = self._merge(labels)
        with self._lock:
            self._values[key] = self._values.get(key, 0.0) + amount

    def value(self, **labels: str) -> float:
        with self._lock:
            return self._values.get(self._merge(labels), 0.0)

    def render(self) -> List[str]:
        with self._lock:
            items = sorted(self._values.items())
        if not items:
            items = [(self._merge({}), 0.0)]
        return [
            f"{self.name}{_format_labels(dict(key))} {_format_value(value)}"
            for key, value in items
        ]


class Gauge(_Metric):
    kind = "gauge"

    def __init__(self, name, help_text, base_labels) -> None:
        super().__init__(name, help_text, base_labels)
        self._values: Dict[Tuple[Tuple[str, str], ...], float] = {}

    def set(self, value: float, **labels: str) -> None:
        with self._lock:
            self._values[self._merge(labels)] = float(value)

    def value(self, **labels: str) -> Optional[float]:
        with self._lock:
            return self._values.get(self._merge(labels))

    def render(self) -> List[str]:
        with self._lock:
            items = sorted(self._values.items())
        return [
            f"{self.name}{_format_labels(dict(key))} {_format_value(value)}"
            for key, value in items
        ]


class Histogram(_Metric):
    kind = "histogram"

    def __init__(self, name, help_text, base_labels, buckets: Sequence[float] = DEFAULT_BUCKETS) -> None:
        super().__init__(name, help_text, base_labels)
        self.buckets = tuple(sorted(buckets))
        self._counts: Dict[Tuple[Tuple[str, str], ...], List[int]] = {}
        self._sums: Dict[Tuple[Tuple[str, str], ...], float] = {}
        self._totals: Dict[Tuple[Tuple[str, str], ...], int] = {}

    def observe(self, value: float, **labels: str) -> None:
        key = self._merge(labels)
        with self._lock:
            counts = self._counts.setdefault(key, [0] * len(self.buckets))
            for i, upper in enumerate(self.buckets):
                if value <= upper:
                    counts[i] += 1
            self._sums[key] = self._sums.get(key, 0.0) + value
            self._totals[key] = self._totals.get(key, 0) + 1

    def count(self, **labels: str) -> int:
        with self._lock:
            return self._totals.get(self._merge(labels), 0)

    def bucket_count(self, upper: float, **labels: str) -> int:
        index = self.buckets.index(upper)
        with self._lock:
            counts = self._counts.get(self._merge(labels))
            return counts[index] if counts else 0

    def render(self) -> List[str]:
        lines: List[str] = []
        with self._lock:
            keys = sorted(self._counts)
            for key in keys:
                base = dict(key)
                counts = self._counts[key]
                for upper, count in zip(self.buckets, counts):
                    labels = dict(base)
                    labels["le"] = repr(upper)
                    lines.append(f"{self.name}_bucket{_format_labels(labels)} {count}")
                labels = dict(base)
                labels["le"] = "+Inf"
                lines.append(f"{self.name}_bucket{_format_labels(labels)} {self._totals[key]}")
                lines.append(f"{self.name}_sum{_format_labels(base)} {repr(self._sums[key])}")
                lines.append(f"{self.name}_count{_format_labels(base)} {self._totals[key]}")
        return lines


class MetricsRegistry:
    """Holds every metric of one pipeline run."""

    def __init__(self, model_size: str = "stub", run_id: str = "local") -> None:
        self.base_labels = {"model_size": model_size, "run_id": run_id}
        self._metrics: Dict[str, _Metric] = {}
        self._lock = threading.Lock()

    def counter(self, name: str, help_text: str = "") -> Counter:
        return self._get_or_create(name, help_text, Counter)

    def gauge(self, name: str, help_text: str = "") -> Gauge:
        return self._get_or_create(name, help_text, Gauge)

    def histogram(self, name: str, help_text: str = "", buckets: Sequence[float] = DEFAULT_BUCKETS) -> Histogram:
        with self._lock:
            metric = self._metrics.get(name)
            if metric is None:
                metric = Histogram(name, help_text, self.base_labels, buckets)
                self._metrics[name] = metric
            if not isinstance(metric, Histogram):
                raise TypeError(f"metric {name} already registered as {metric.kind}")
            return metric

    def _get_or_create(self, name: str, help_text: str, cls) -> _Metric:
        with self._lock:
            metric = self._metrics.get(name)
            if metric is None:
                metric = cls(name, help_text, self.base_labels)
                self._metrics[name] = metric
            if not isinstance(metric, cls):
                raise TypeError(f"metric {name} already registered as {metric.kind}")
            return metric

    def render(self) -> str:
        with self._lock:
            metrics = [self._metrics[name] for name in sorted(self._metrics)]
        lines: List[str] = []
        for metric in metrics:
            if metric.help:
                lines.append(f"# HELP {metric.name} {metric.help}")
            lines.append(f"# TYPE {metric.name} {metric.kind}")
            lines.extend(metric.render())
        return "\n".join(lines) + "\n"


class _MetricsHandler(BaseHTTPRequestHandler):
    registry: MetricsRegistry

    def do_GET(self) -> None:  # noqa: N802 (http.server API)
        if self.path.rstrip("/") not in ("", "/metrics".rstrip("/")):
            self.send_response(404)
            self.end_headers()
            return
        body = self.registry.render().encode("utf-8")
        self.send_response(200)
        self.send_header("Content-Type", "text/plain; version=0.0.4; charset=utf-8")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def log_message(self, *args) -> None:
        pass


class MetricsServer:
    def __init__(self, registry: MetricsRegistry, port: int, host: str = "127.0.0.1") -> None:
        handler = type("_Handler", (_MetricsHandler,), {"registry": registry})
        self._server = ThreadingHTTPServer((host, port), handler)
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)
        self._thread.start()

    @property
    def port(self) -> int:
        return self._server.server_address[1]

    def close(self) -> None:
        self._server.shutdown()
        self._server.server_close()
        self._thread.join(timeout=2.0)


def serve_metrics(registry: MetricsRegistry, port: int, host: str = "127.0.0.1") -> MetricsServer:
    """Serve /metrics over HTTP; returns a handle with .port and .close()."""
    return MetricsServer(registry, port, host)


def export_metrics(registry: MetricsRegistry, output_path: Optional[str] = None) -> str:
    """Render the exposition text; optionally also write it to a file."""
    text = registry.render()
    if output_path:
        with open(output_path, "w", encoding="utf-8") as handle:
            handle.write(text)
    return text
