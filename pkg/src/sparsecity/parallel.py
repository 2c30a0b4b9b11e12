"""Deterministic fan-out for independent experiment cells.

Cells (trials, supports, grid points) are independent by construction: each
one derives its own seed, so the only ordering requirement is that results
are assembled in input order.  ``pmap`` guarantees exactly that, which makes
``threads=1`` and ``threads=k`` produce identical output.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def pmap(fn: Callable[[T], R], items: Iterable[T], threads: int = 1) -> list[R]:
    """Map ``fn`` over ``items``, preserving input order in the result."""
    seq: Sequence[T] = list(items)
    if threads <= 1 or len(seq) <= 1:
        return [fn(item) for item in seq]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, seq))
