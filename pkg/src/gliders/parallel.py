"""Scheduling-independent fan-out of trial batches."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable

import numpy as np

# chunks per worker; more chunks smooth out uneven trial costs
CHUNKS_PER_WORKER = 4


def map_trials(fn: Callable[[np.ndarray], np.ndarray], trial_ids, workers: int = 1) -> np.ndarray:
    """Apply ``fn`` to contiguous chunks of ``trial_ids`` and concatenate in order.

    ``fn`` must return one result per trial that depends only on the trial id,
    which makes the output independent of ``workers``. The kernels release the
    GIL, so a thread pool is enough.
    """
    ids = np.ascontiguousarray(trial_ids, dtype=np.int64)
    if workers < 1:
        raise ValueError("workers must be at least 1")
    if workers == 1 or ids.size < 2:
        return np.asarray(fn(ids))
    chunks = [c for c in np.array_split(ids, min(ids.size, workers * CHUNKS_PER_WORKER)) if c.size]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(fn, chunks))
    return np.concatenate(parts)
