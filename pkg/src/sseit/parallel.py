"""Deterministic map over independent work items, optionally in processes.

Results are always returned in input order so that downstream files are
byte-identical regardless of the worker count.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor

__all__ = ["ordered_map", "default_workers"]

_ENV_VAR = "SSEIT_WORKERS"


def default_workers() -> int:
    """Worker count from the SSEIT_WORKERS environment variable (default 1)."""
    raw = os.environ.get(_ENV_VAR, "")
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(1, n)


def ordered_map(fn, items, workers: int | None = None) -> list:
    """Apply ``fn`` to every item, preserving input order in the result.

    ``workers > 1`` fans the items out to a process pool; each item must be
    a pure, picklable task for results to be independent of the pool size.
    """
    items = list(items)
    if workers is None:
        workers = default_workers()
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ProcessPoolExecutor(max_workers=min(workers, len(items))) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * workers))))
