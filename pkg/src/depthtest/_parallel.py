"""Index-ordered parallel map over replications.

Results are returned in index order, so aggregates do not depend on the
number of workers.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from functools import partial
from typing import Callable, Sequence, TypeVar

T = TypeVar("T")


def _run_chunk(func: Callable[[int], T], indices: Sequence[int]) -> list[T]:
    return [func(i) for i in indices]


def indexed_map(func: Callable[[int], T], count: int, workers: int = 1) -> list[T]:
    """``[func(0), ..., func(count - 1)]``, optionally spread over processes.

    ``func`` must be picklable when ``workers > 1``.
    """
    if workers <= 1 or count < 2:
        return [func(i) for i in range(count)]
    n_chunks = min(count, 4 * workers)
    bounds = [count * k // n_chunks for k in range(n_chunks + 1)]
    chunks = [range(bounds[k], bounds[k + 1]) for k in range(n_chunks)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = pool.map(partial(_run_chunk, func), chunks)
        return [r for part in parts for r in part]
