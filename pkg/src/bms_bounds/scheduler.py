"""Bounded worker pool that returns results in submission order."""

from __future__ import annotations

import asyncio
import logging
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from typing import Generic, TypeVar

from .config import default_thread_count

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


@dataclass
class PoolSnapshot:
    submitted: int = 0
    completed: int = 0
    failed: list[int] = field(default_factory=list)


class OrderedWorkPool(Generic[T, R]):
    """Runs a pure function over work items on threads, at most ``max_workers`` at once.

    Results come back indexed like the input regardless of completion order,
    so callers can reduce them deterministically.
    """

    def __init__(self, worker: Callable[[T], R], *, max_workers: int | None = None) -> None:
        workers = default_thread_count() if max_workers is None else max_workers
        if workers < 1:
            raise ValueError("max_workers must be positive.")
        self.worker = worker
        self.max_workers = workers
        self._snapshot = PoolSnapshot()

    @property
    def snapshot(self) -> PoolSnapshot:
        return self._snapshot

    async def run(self, items: Sequence[T]) -> list[R]:
        if not items:
            return []

        self._snapshot = PoolSnapshot(submitted=len(items))
        if self.sequential(items):
            # off the loop thread, so a worker may start its own pool
            return [await asyncio.to_thread(self._call, index, item) for index, item in enumerate(items)]

        semaphore = asyncio.Semaphore(min(self.max_workers, len(items)))
        tasks = [asyncio.create_task(self._run_item(index, item, semaphore)) for index, item in enumerate(items)]
        return list(await asyncio.gather(*tasks))

    def run_sync(self, items: Sequence[T]) -> list[R]:
        """Blocking entry point for synchronous callers."""

        if self.sequential(items):
            self._snapshot = PoolSnapshot(submitted=len(items))
            return [self._call(index, item) for index, item in enumerate(items)]
        return asyncio.run(self.run(items))

    def sequential(self, items: Sequence[T]) -> bool:
        return self.max_workers == 1 or len(items) <= 1

    def _call(self, index: int, item: T) -> R:
        try:
            result = self.worker(item)
        except Exception:
            self._snapshot.failed.append(index)
            raise
        self._snapshot.completed += 1
        return result

    async def _run_item(self, index: int, item: T, semaphore: asyncio.Semaphore) -> R:
        async with semaphore:
            return await asyncio.to_thread(self._call, index, item)


def map_ordered(worker: Callable[[T], R], items: Sequence[T], *, max_workers: int | None = None) -> list[R]:
    pool: OrderedWorkPool[T, R] = OrderedWorkPool(worker, max_workers=max_workers)
    results = pool.run_sync(items)
    logger.debug("pool finished %d items on %d workers", len(results), pool.max_workers)
    return results
