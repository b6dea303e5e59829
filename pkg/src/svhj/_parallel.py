"""Optional thread fan-out over independent per-direction work items."""

import os
from concurrent.futures import ThreadPoolExecutor


def max_workers():
    """Worker cap from ``SVHJ_THREADS`` (default 1, i.e. serial)."""
    raw = os.environ.get("SVHJ_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def pmap(fn, items):
    """``[fn(item) for item in items]``, threaded when ``SVHJ_THREADS > 1``.

    Results keep the input order, so output is identical either way.
    """
    workers = min(max_workers(), len(items))
    if workers <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
