"""
wienerlab Logging Utilities

Standardized logging for experiments and numerical operations. Records go to
the ``wienerlab`` stdlib logger hierarchy as JSON lines (see utils.logging).
"""

import json
import time
import traceback
from functools import wraps

from wienerlab.utils.logging import get_logger as get_structured_logger


def get_logger(name: str = "wienerlab"):
    """Get wienerlab logger instance."""
    return get_structured_logger(name)


def log_info(message: str, data: dict | None = None):
    """
    Log info level message.

    Args:
        message: Log message
        data: Optional additional data to log
    """
    get_logger().info(message, **(data or {}))


def log_debug(message: str, data: dict | None = None):
    """Log debug level message."""
    get_logger().debug(message, **(data or {}))


def log_error(message: str, data: dict | None = None, exc: Exception | None = None):
    """
    Log error with optional traceback.

    Args:
        message: Error message
        data: Optional additional data
        exc: Optional exception object
    """
    error_details = {
        "data": data,
        "traceback": traceback.format_exc() if exc else None,
    }
    if exc is not None and hasattr(exc, "to_dict"):
        error_details["error"] = exc.to_dict()
    get_logger().error(message, **json.loads(json.dumps(error_details, default=str)))


def log_action(action_name: str):
    """
    Decorator to log function entry/exit and exceptions.

    Usage:
        @log_action("Capacity profile")
        def capacity_profile(domain, x_o, p, num_scales, cfg):
            ...
    """
    def decorator(func):
        @wraps(func)
        def wrapper(*args, **kwargs):
            logger = get_logger()
            func_name = func.__name__

            logger.debug(f"[{action_name}] Starting {func_name}")

            try:
                result = func(*args, **kwargs)
                logger.debug(f"[{action_name}] Completed {func_name}")
                return result
            except Exception as e:
                log_error(f"[{action_name}] Failed in {func_name}: {e!s}", exc=e)
                raise

        return wrapper
    return decorator


def log_experiment(experiment_name: str):
    """
    Decorator for experiments and checks with timing.

    Usage:
        @log_experiment("Boundary decay")
        def verify_boundary_decay(cfg):
            ...
    """
    def decorator(func):
        @wraps(func)
        def wrapper(*args, **kwargs):
            start_time = time.perf_counter()

            log_info(f"Experiment Started: {experiment_name}")

            try:
                result = func(*args, **kwargs)
                execution_time = time.perf_counter() - start_time

                log_info(f"Experiment Completed: {experiment_name}", {
                    "execution_time_seconds": round(execution_time, 2),
                    "passed": getattr(result, "passed", None),
                })

                return result
            except Exception as e:
                execution_time = time.perf_counter() - start_time
                log_error(f"Experiment Failed: {experiment_name}", {
                    "execution_time_seconds": round(execution_time, 2)
                }, exc=e)
                raise

        return wrapper
    return decorator


def log_capacity_solved(value: float, iterations: int, residual: float, method: str):
    """Log a converged condenser computation."""
    log_debug("Capacity solved", {
        "value": value,
        "iterations": iterations,
        "residual": residual,
        "method": method,
    })


def log_scale_measured(rho: float, delta: float, omega: float | None = None):
    """Log per-scale measurement."""
    log_debug(f"Scale measured: rho={rho:.6g}", {"delta": delta, "omega": omega})
