"""Seeded, schedule-independent Monte Carlo plumbing.

Every random stream is keyed by ``(base_seed, *keys)`` through
:class:`numpy.random.SeedSequence`, so a trial draws the same numbers no
matter which worker runs it or in which order.
"""

from concurrent.futures import ThreadPoolExecutor
import os

import numpy as np

_threads = 1


def rng_for(seed: int, *keys: int) -> np.random.Generator:
    """Generator for the stream identified by ``seed`` and integer ``keys``."""
    return np.random.default_rng(np.random.SeedSequence([int(seed) & (2**64 - 1), *map(int, keys)]))


def set_threads(n: int) -> None:
    global _threads
    _threads = max(1, int(n))


def threads() -> int:
    return _threads


def map_trials(fn, items, n_threads=None):
    """``[fn(x) for x in items]``, optionally across threads; order is preserved."""
    n = n_threads or _threads
    items = list(items)
    if n <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=min(n, os.cpu_count() or n)) as pool:
        return list(pool.map(fn, items))
