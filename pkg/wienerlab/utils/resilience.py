# -*- coding: utf-8 -*-
# License: GNU General Public License v3

"""
Resilience Utilities for wienerlab

Retry logic for implicit time steps: a step whose Newton iteration fails is
retried as two half steps, recursively, up to a halving budget.
"""

from __future__ import annotations

import functools
from typing import Callable, TypeVar

import numpy as np

from wienerlab.exceptions import SolverConvergenceError
from wienerlab.utils.logging import get_logger
from wienerlab.utils.metrics import metrics

T = TypeVar("T")

logger = get_logger("wienerlab.resilience")


def retry_with_halving(
    max_halvings: int = 4,
    exceptions: tuple = (SolverConvergenceError,),
    on_retry: Callable[[Exception, int], None] | None = None
):
    """Decorator for ``advance(state, t, dt, *args, **kwargs) -> state`` callables.

    On failure the interval [t, t + dt] is covered by two calls with dt / 2,
    each of which may halve again, until ``max_halvings`` levels are used up.
    The last exception is re-raised when the budget is exhausted.
    """
    def decorator(func: Callable[..., T]) -> Callable[..., T]:
        @functools.wraps(func)
        def wrapper(state, t: float, dt: float, *args, **kwargs) -> T:
            def attempt(u, t0: float, h: float, depth: int):
                try:
                    return func(u, t0, h, *args, **kwargs)
                except exceptions as e:
                    if depth >= max_halvings:
                        raise

                    if on_retry:
                        on_retry(e, depth + 1)

                    metrics.increment("dt_halvings")
                    logger.warning(
                        f"Retry {depth + 1}/{max_halvings} for {func.__name__}: {e}",
                        t=t0, dt=h / 2
                    )

                    half = h / 2
                    mid = attempt(u, t0, half, depth + 1)
                    return attempt(mid, t0 + half, half, depth + 1)

            return attempt(state, t, dt, 0)

        return wrapper

    return decorator


def finite_or_raise(field: np.ndarray, what: str, dt: float | None = None) -> np.ndarray:
    """Reject NaN/inf states so they trigger a retry instead of propagating"""
    if not np.all(np.isfinite(field)):
        raise SolverConvergenceError(f"non-finite values in {what}", dt=dt)
    return field
