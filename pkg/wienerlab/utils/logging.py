# -*- coding: utf-8 -*-
# License: GNU General Public License v3

"""
Structured Logging Utilities for wienerlab

Provides run IDs and JSON-line logging so every record emitted during an
experiment can be traced back to the run manifest that produced it.
"""

from __future__ import annotations

import json
import logging
import uuid
from contextlib import contextmanager
from contextvars import ContextVar
from datetime import datetime, timezone
from typing import Any

_run_id: ContextVar[str | None] = ContextVar("wienerlab_run_id", default=None)
_log_context: ContextVar[dict[str, Any]] = ContextVar("wienerlab_log_context", default={})


class RunContext:
    """Manages the run ID shared by all log records of one command invocation"""

    @classmethod
    def get_id(cls) -> str:
        """Get or create the run ID for the current context"""
        run_id = _run_id.get()
        if run_id is None:
            run_id = cls._generate_id()
            _run_id.set(run_id)
        return run_id

    @classmethod
    def set_id(cls, run_id: str):
        """Set run ID (the CLI derives it from the manifest)"""
        _run_id.set(run_id)

    @classmethod
    def _generate_id(cls) -> str:
        return uuid.uuid4().hex[:12]

    @classmethod
    def clear(cls):
        _run_id.set(None)


class StructuredLogger:
    """
    Structured logger for wienerlab.

    Usage:
        logger = StructuredLogger("wienerlab.pde")
        logger.info("Step accepted", t=0.25, newton_iterations=4)
    """

    def __init__(self, name: str = "wienerlab"):
        self.name = name
        self._logger = logging.getLogger(name)

    def _format_message(self, level: str, message: str, **kwargs) -> dict[str, Any]:
        entry: dict[str, Any] = {
            "timestamp": datetime.now(timezone.utc).isoformat().replace("+00:00", "Z"),
            "level": level.upper(),
            "app": "wienerlab",
            "logger": self.name,
            "run_id": RunContext.get_id(),
            "message": message,
        }

        data = {**_log_context.get(), **kwargs}
        if data:
            entry["data"] = data

        return entry

    def _log(self, level: str, message: str, **kwargs):
        method = getattr(self._logger, level.lower())
        if not self._logger.isEnabledFor(getattr(logging, level.upper())):
            return
        entry = self._format_message(level, message, **kwargs)
        method(json.dumps(entry, default=str, ensure_ascii=False))

    def debug(self, message: str, **kwargs):
        self._log("debug", message, **kwargs)

    def info(self, message: str, **kwargs):
        self._log("info", message, **kwargs)

    def warning(self, message: str, **kwargs):
        self._log("warning", message, **kwargs)

    def error(self, message: str, **kwargs):
        self._log("error", message, **kwargs)

    def solver_event(
        self,
        event: str,
        t: float | None = None,
        dt: float | None = None,
        iterations: int | None = None,
        residual: float | None = None,
        error: str | None = None
    ):
        """Log a time-stepping event with standard fields"""
        data: dict[str, Any] = {"event": event}
        if t is not None:
            data["t"] = t
        if dt is not None:
            data["dt"] = dt
        if iterations is not None:
            data["iterations"] = iterations
        if residual is not None:
            data["residual"] = residual
        if error:
            data["error"] = error

        level = "debug" if not error else "warning"
        self._log(level, f"Solver {event}", **data)

    def check_event(self, check: str, passed: bool, **metrics):
        """Log the outcome of a verification check"""
        level = "info" if passed else "warning"
        self._log(level, f"Check {check}: {'pass' if passed else 'fail'}", check=check, passed=passed, **metrics)


# Singleton logger instance
logger = StructuredLogger("wienerlab")


def get_logger(name: str | None = None) -> StructuredLogger:
    """Get a logger instance"""
    if name is None:
        return logger
    return StructuredLogger(name)


@contextmanager
def log_context(**kwargs):
    """Context manager for adding extra context to all logs within block"""
    token = _log_context.set({**_log_context.get(), **kwargs})
    try:
        yield
    finally:
        _log_context.reset(token)


def get_log_context() -> dict:
    return dict(_log_context.get())


def configure(level: int = logging.INFO, stream=None):
    """Attach a plain handler to the ``wienerlab`` logger (records are already JSON)"""
    root = logging.getLogger("wienerlab")
    root.setLevel(level)
    if not any(getattr(h, "_wienerlab", False) for h in root.handlers):
        handler = logging.StreamHandler(stream)
        handler.setFormatter(logging.Formatter("%(message)s"))
        handler._wienerlab = True  # type: ignore[attr-defined]
        root.addHandler(handler)
    for h in root.handlers:
        h.setLevel(level)
