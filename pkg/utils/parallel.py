"""
Bounded fan-out for per-record and per-grid-point work
"""
import logging
import os

from joblib import Parallel, delayed

from core.errors import InvalidConfig

logger = logging.getLogger("Parallel")

THREADS_ENV = "VIBRODIAG_THREADS"


def thread_count(value=None):
    """
    Resolve the worker count.

    Parameters:
    - value: Explicit count, or None to read VIBRODIAG_THREADS (0 = auto)

    Returns:
    - joblib n_jobs value (-1 for auto, otherwise a positive count)
    """
    if value is None:
        raw = os.environ.get(THREADS_ENV, "0").strip() or "0"
        try:
            value = int(raw)
        except ValueError:
            raise InvalidConfig(f"{THREADS_ENV} must be an integer, got {raw!r}")
    if value < 0:
        raise InvalidConfig(f"Thread count must be >= 0, got {value}")
    return -1 if value == 0 else value


def ordered_map(func, items, n_jobs=1):
    """
    Apply func to every item and return results in input order.

    Results are collected in submission order whatever the worker count, so
    parallel and sequential runs produce identical output.
    """
    items = list(items)
    if n_jobs == 1 or len(items) <= 1:
        return [func(item) for item in items]
    logger.debug(f"Dispatching {len(items)} tasks with n_jobs={n_jobs}")
    return Parallel(n_jobs=n_jobs)(delayed(func)(item) for item in items)
