"""Fan independent jobs out to worker threads.

numpy releases the GIL for the heavy array work, so a thread pool is
enough. Results always come back in job order, whatever order the workers
finish in.
"""

from __future__ import annotations

import logging
from typing import Callable, Dict, List, Sequence, TypeVar

import anyio
import anyio.to_thread

J = TypeVar("J")
R = TypeVar("R")

logger = logging.getLogger(__name__)


def run_jobs(func: Callable[[J], R], jobs: Sequence[J], workers: int) -> List[R]:
    """Call ``func`` on every job, using up to ``workers`` threads."""
    if workers <= 1 or len(jobs) <= 1:
        return [func(job) for job in jobs]

    results: List = [None] * len(jobs)
    errors: Dict[int, Exception] = {}

    async def run_all() -> None:
        limiter = anyio.CapacityLimiter(workers)

        async def run_one(index: int, job: J) -> None:
            try:
                results[index] = await anyio.to_thread.run_sync(
                    func, job, limiter=limiter
                )
            except Exception as e:
                errors[index] = e

        async with anyio.create_task_group() as tg:
            for index, job in enumerate(jobs):
                tg.start_soon(run_one, index, job)

    logger.debug(f"Running {len(jobs)} jobs on {workers} worker threads")
    anyio.run(run_all)
    if errors:
        # the lowest-indexed failure, as the inline path would raise it
        raise errors[min(errors)]
    return results
