"""Ordered thread-pool map used by the grid, replication and batch loops.

Results always come back in input order, so merged outputs are identical for
any worker count. numpy releases the GIL inside its kernels, which is where
the fits spend their time.
"""
from __future__ import annotations
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

from .config import resolve_workers

T = TypeVar('T')
R = TypeVar('R')


def ordered_map(func: Callable[[T], R], items: Iterable[T], workers: Optional[int] = None) -> List[R]:
    """Apply `func` to every item, concurrently when more than one worker is allowed."""
    items = list(items)
    count = resolve_workers(workers)
    if count <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers = min(count, len(items))) as pool:
        return list(pool.map(func, items))
