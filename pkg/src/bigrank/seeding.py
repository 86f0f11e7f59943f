"""Counter-based seed splitting.

Child ``i`` of master seed ``m`` is ``SeedSequence(m, spawn_key=(i,))``, the
same stream ``SeedSequence(m).spawn(...)[i]`` would produce. Any worker can
rebuild child ``i`` without coordination, so serial and parallel runs agree.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, TypeVar

import numpy as np

T = TypeVar("T")
R = TypeVar("R")

THREADS_ENV = "BIGRANK_THREADS"


def child_seed(master: int, index: int) -> int:
    """64-bit integer seed of child ``index``."""
    seq = np.random.SeedSequence(master, spawn_key=(index,))
    return int(seq.generate_state(1, dtype=np.uint64)[0])


def child_rng(master: int, index: int) -> np.random.Generator:
    return np.random.default_rng(child_seed(master, index))


def thread_count(default: int = 1) -> int:
    raw = os.environ.get(THREADS_ENV)
    if not raw:
        return default
    try:
        return max(1, int(raw))
    except ValueError:
        raise ValueError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None


def parallel_map(fn: Callable[[T], R], items: Iterable[T], n_jobs: int = 1) -> list[R]:
    """Order-preserving map, threaded when ``n_jobs > 1``."""
    items = list(items)
    if n_jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n_jobs) as pool:
        return list(pool.map(fn, items))
