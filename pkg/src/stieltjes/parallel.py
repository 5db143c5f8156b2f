"""Order-preserving thread map capped by ``STIELTJES_THREADS``."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor


def thread_count() -> int:
    try:
        n = int(os.environ.get("STIELTJES_THREADS", "0"))
    except ValueError:
        n = 0
    return n if n > 0 else min(4, os.cpu_count() or 1)


def parallel_map(fn, items):
    """``[fn(x) for x in items]``, run on a thread pool when it can help."""
    items = list(items)
    workers = min(thread_count(), len(items))
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
