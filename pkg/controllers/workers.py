# controllers/workers.py
from __future__ import annotations

import os
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

T = TypeVar("T")
R = TypeVar("R")

log = logging.getLogger(__name__)

_DEFAULT_THREADS: Optional[int] = None


def set_default_threads(threads: Optional[int]) -> None:
    """Process-wide worker cap (the CLI's --threads)."""
    global _DEFAULT_THREADS
    if threads is not None and threads < 1:
        raise ValueError("threads must be >= 1")
    _DEFAULT_THREADS = threads


def resolve_threads(threads: Optional[int] = None) -> int:
    if threads is not None:
        return max(1, int(threads))
    if _DEFAULT_THREADS is not None:
        return _DEFAULT_THREADS
    return max(1, os.cpu_count() or 1)


def ordered_map(fn: Callable[[T], R], items: Iterable[T], threads: Optional[int] = None) -> List[R]:
    """
    Map fn over items with at most `threads` workers.
    Results come back in input order, so callers never depend on scheduling.
    """
    seq = list(items)
    n = resolve_threads(threads)
    if n == 1 or len(seq) <= 1:
        return [fn(x) for x in seq]
    log.debug("ordered_map: %d items on %d workers", len(seq), min(n, len(seq)))
    with ThreadPoolExecutor(max_workers=min(n, len(seq))) as pool:
        return list(pool.map(fn, seq))
