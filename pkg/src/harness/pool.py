"""Fan-out of independent folds and grid cells over worker processes."""

import logging
from collections.abc import Callable, Hashable, Sequence
from multiprocessing import Pool
from typing import Any, TypeVar

logger = logging.getLogger(__name__)

K = TypeVar("K", bound=Hashable)
R = TypeVar("R")


def task_launcher(args: tuple[Callable[..., Any], Any, tuple]) -> tuple[Any, Any]:
    fn, key, payload = args
    return key, fn(*payload)


def run_parallel(
    fn: Callable[..., R],
    tasks: Sequence[tuple[K, tuple]],
    workers: int = 1,
) -> dict[K, R]:
    """Run ``fn(*payload)`` for every ``(key, payload)`` and key the results.

    `fn` and the payloads must be picklable when ``workers > 1``. Each task
    builds its own model and RNG, so results do not depend on scheduling;
    the returned dict is ordered by key.
    """
    jobs = [(fn, key, payload) for key, payload in tasks]
    keys = [key for key, _ in tasks]
    if len(set(keys)) != len(keys):
        raise ValueError("task keys must be unique")
    if workers <= 1 or len(jobs) <= 1:
        results = [task_launcher(job) for job in jobs]
    else:
        n = min(workers, len(jobs))
        logger.info("Running %d tasks on %d worker processes", len(jobs), n)
        with Pool(n) as p:
            results = p.map(task_launcher, jobs)
    return dict(sorted(results, key=lambda item: item[0]))
