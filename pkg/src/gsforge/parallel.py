"""Thread-count control. GSFORGE_THREADS caps the worker pool (default 1).

Work is always split into the same fixed-size chunks, so results do not
depend on how many threads run them.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

CHUNK = 4096


def thread_count(requested: int | None = None) -> int:
    env = os.environ.get("GSFORGE_THREADS", "").strip()
    cap = None
    if env:
        try:
            cap = int(env)
        except ValueError:
            raise ValueError(f"GSFORGE_THREADS must be a positive integer, got {env!r}") from None
        if cap < 1:
            raise ValueError(f"GSFORGE_THREADS must be a positive integer, got {env!r}")
    n = requested if requested is not None else (cap or 1)
    if cap is not None:
        n = min(n, cap)
    return max(1, int(n))


def chunked_map(fn, rows: np.ndarray, threads: int | None = None, chunk: int = CHUNK) -> list:
    """[fn(rows[i:i+chunk]) for each chunk], run on up to ``thread_count`` threads."""
    pieces = [rows[i:i + chunk] for i in range(0, len(rows), chunk)]
    n = thread_count(threads)
    if n == 1 or len(pieces) <= 1:
        return [fn(p) for p in pieces]
    with ThreadPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, pieces))
