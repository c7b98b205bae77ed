"""Thread-pool mapping with ordered results and keyed random streams.

Work items are always reduced in submission order, and every random stream
is derived from ``(seed, key)`` alone, so results do not depend on how many
threads execute the work.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, TypeVar

import numpy as np

T = TypeVar("T")
R = TypeVar("R")

_threads: int | None = None


def default_threads() -> int:
    if _threads is not None:
        return _threads
    try:
        return max(1, int(os.environ.get("BVF_THREADS", "1")))
    except ValueError:
        return 1


def set_threads(n: int | None) -> None:
    """Override the worker count for this process (``None`` restores the default)."""
    global _threads
    _threads = None if n is None else max(1, int(n))


def pmap(fn: Callable[[T], R], items: Iterable[T], threads: int | None = None) -> list[R]:
    items = list(items)
    n = default_threads() if threads is None else threads
    if n <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def stream(seed: int, *key: int) -> np.random.Generator:
    """A counter-based generator keyed by ``(seed, key...)``."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))))
