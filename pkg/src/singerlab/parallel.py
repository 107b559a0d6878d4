"""Thread-count control and an order-preserving parallel map.

``SINGERLAB_THREADS`` caps the worker count; 0 or unset means one worker per
CPU.  Results are always returned in input order, so output never depends
on scheduling.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor


def thread_count() -> int:
    raw = os.environ.get("SINGERLAB_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"SINGERLAB_THREADS must be an integer, got {raw!r}") from None
    if n < 0:
        raise ValueError("SINGERLAB_THREADS must be >= 0")
    return n or (os.cpu_count() or 1)


def pmap(fn, items) -> list:
    items = list(items)
    workers = min(thread_count(), len(items))
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
