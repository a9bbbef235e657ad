# -*- coding: utf-8 -*-
# License: GNU General Public License v3

"""
Metrics for wienerlab

Collects operational metrics (iteration counts, step halvings, wall times)
in process memory; run manifests embed a snapshot.
"""

from __future__ import annotations

import time
from contextlib import contextmanager
from threading import Lock


class MetricsCollector:
    """Collects and stores metrics for numerical operations"""

    PREFIX = "metrics:wienerlab"
    MAX_TIMINGS = 100

    def __init__(self):
        self._store: dict[str, object] = {}
        self._lock = Lock()

    def increment(self, name: str, value: float = 1, tags: dict | None = None):
        key = self._make_key(name, tags)
        with self._lock:
            self._store[key] = float(self._store.get(key, 0)) + value  # type: ignore[arg-type]

    def timing(self, name: str, duration_ms: float, tags: dict | None = None):
        key = self._make_key(f"{name}:timings", tags)
        with self._lock:
            timings = list(self._store.get(key, []))  # type: ignore[call-overload]
            timings.append(duration_ms)
            self._store[key] = timings[-self.MAX_TIMINGS:]

    @contextmanager
    def timer(self, name: str, tags: dict | None = None):
        start = time.perf_counter()
        try:
            yield
        finally:
            duration_ms = (time.perf_counter() - start) * 1000
            self.timing(name, duration_ms, tags)

    def _make_key(self, name: str, tags: dict | None = None) -> str:
        key = f"{self.PREFIX}:{name}"
        if tags:
            tag_str = ":".join(f"{k}={v}" for k, v in sorted(tags.items()))
            key = f"{key}:{tag_str}"
        return key

    def get_counter(self, name: str, tags: dict | None = None) -> float:
        return float(self._store.get(self._make_key(name, tags), 0))  # type: ignore[arg-type]

    def snapshot(self) -> dict:
        """Counters and timing summaries, keyed without the prefix"""
        out: dict[str, object] = {}
        with self._lock:
            items = list(self._store.items())
        for key, value in sorted(items):
            short = key[len(self.PREFIX) + 1:]
            if short.endswith(":timings") or ":timings:" in short:
                values = list(value)  # type: ignore[call-overload]
                out[short] = {"count": len(values), "total_ms": round(sum(values), 3)}
            else:
                out[short] = value
        return out

    def reset(self):
        with self._lock:
            self._store.clear()


metrics = MetricsCollector()


def record_capacity_solve(method: str, iterations: int, duration_ms: float):
    """Record a condenser minimisation"""
    metrics.increment("capacity_solves", tags={"method": method})
    metrics.increment("capacity_iterations", iterations, tags={"method": method})
    metrics.timing("capacity_solve", duration_ms, tags={"method": method})


def record_newton_step(iterations: int, converged: bool):
    """Record an implicit Euler step"""
    metrics.increment("time_steps")
    metrics.increment("newton_iterations", iterations)
    if not converged:
        metrics.increment("newton_failures")


def record_check(check: str, passed: bool):
    """Record a verification check outcome"""
    metrics.increment("checks_total", tags={"check": check})
    if not passed:
        metrics.increment("checks_failed", tags={"check": check})
