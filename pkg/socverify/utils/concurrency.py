"""
Worker pool for independent evaluations.

Family members and per-node scans are independent; they are mapped over a
thread pool whose size comes from SOC_VERIFY_THREADS (default 1, which runs
sequentially in the calling thread). Results always come back in input order.
"""

import os
from collections.abc import Callable, Iterable
from concurrent.futures import ThreadPoolExecutor
from typing import TypeVar

from .logging_config import get_logger

logger = get_logger(__name__)

T = TypeVar("T")
R = TypeVar("R")

THREADS_ENV = "SOC_VERIFY_THREADS"


def worker_count() -> int:
    """Number of workers from SOC_VERIFY_THREADS; invalid values fall back to 1."""
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        count = int(raw)
    except ValueError:
        logger.warning(f"ignoring non-integer {THREADS_ENV}={raw!r}, using 1 worker")
        return 1
    if count < 1:
        logger.warning(f"ignoring {THREADS_ENV}={count}, using 1 worker")
        return 1
    return count


def ordered_map(fn: Callable[[T], R], items: Iterable[T], workers: int | None = None) -> list[R]:
    """
    Apply fn to every item and return the results in input order.

    Args:
        fn: Function of one item.
        items: Inputs.
        workers: Pool size; defaults to worker_count().

    Returns:
        list: fn(item) for every item.
    """
    items = list(items)
    workers = worker_count() if workers is None else workers
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    logger.debug(f"mapping {len(items)} tasks over {workers} threads")
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
