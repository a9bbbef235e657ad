# -*- coding: utf-8 -*-
# License: GNU General Public License v3

"""
Parallel Job Utilities for wienerlab

Independent jobs (one condenser per scale, one experiment per refinement
level) run on a thread pool. Results are returned in submission order, so
output does not depend on the worker count.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, TypeVar

from wienerlab.utils.logging import RunContext, get_log_context, get_logger, log_context

T = TypeVar("T")
R = TypeVar("R")

WORKERS_ENV = "WIENERLAB_WORKERS"

logger = get_logger("wienerlab.background")


def default_workers() -> int:
    """Worker count from ``WIENERLAB_WORKERS`` (1 when unset or invalid)"""
    raw = os.environ.get(WORKERS_ENV, "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def run_ordered(func: Callable[[T], R], items: Iterable[T], workers: int | None = None) -> list[R]:
    """Map ``func`` over ``items``; results keep the order of ``items``.

    Exceptions propagate from the first failing item in input order.
    """
    jobs = list(items)
    workers = default_workers() if workers is None else max(1, int(workers))
    if workers == 1 or len(jobs) <= 1:
        return [func(item) for item in jobs]

    context = get_log_context()
    run_id = RunContext.get_id()

    def job(item: T) -> R:
        RunContext.set_id(run_id)
        with log_context(**context):
            return func(item)

    logger.debug("Dispatching parallel jobs", jobs=len(jobs), workers=workers)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(job, item) for item in jobs]
        return [f.result() for f in futures]
