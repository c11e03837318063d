"""Tiny thread-pool helper for the embarrassingly parallel loops.

The heavy per-item work in this package is dense linear algebra and ODE
integration, which release the GIL, so plain threads give a real speedup
without any pickling headaches.
"""

from concurrent.futures import ThreadPoolExecutor


def parallel_map(fn, items, threads=1):
    """map(fn, items) as a list, in order; threads <= 1 stays sequential."""
    items = list(items)
    if threads is None or int(threads) <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=int(threads)) as pool:
        return list(pool.map(fn, items))
