"""Thread workers that drain a JobQueue with prefetch-1 leases."""
import logging
import threading
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Optional

from elfkit.jobqueue.queue import JobQueue, Task

logger = logging.getLogger(__name__)

Handler = Callable[[Task], None]


class _Budget:
    """Shared cap on the number of tasks started across workers."""

    def __init__(self, limit: Optional[int]):
        self._limit = limit
        self._used = 0
        self._lock = threading.Lock()

    def take(self) -> bool:
        with self._lock:
            if self._limit is not None and self._used >= self._limit:
                return False
            self._used += 1
            return True


def _work(queue: JobQueue, worker: str, handler: Handler, budget: _Budget) -> int:
    done = 0
    while budget.take():
        task = queue.lease(worker)
        if task is None:
            break
        try:
            handler(task)
        except Exception:
            logger.exception("Worker %s failed on task %d (%s).", worker, task.id, task.payload)
            queue.release(worker, task.id)
            raise
        queue.ack(worker, task.id)
        done += 1
    return done


def run_workers(
    queue: JobQueue,
    handler: Handler,
    workers: int = 1,
    prefix: str = "worker",
    max_tasks: Optional[int] = None,
) -> int:
    """
    Drain the queue with `workers` threads and return the number of acked tasks.

    A failing handler releases its task and stops its worker; the first failure is
    re-raised after all workers finish. `max_tasks` stops early, leaving the rest
    queued for a later run.
    """
    workers = max(1, workers)
    budget = _Budget(max_tasks)
    with ThreadPoolExecutor(max_workers=workers, thread_name_prefix=prefix) as pool:
        futures = [
            pool.submit(_work, queue, f"{prefix}-{i}", handler, budget) for i in range(workers)
        ]
    total = 0
    first_error: Optional[BaseException] = None
    for future in futures:
        error = future.exception()
        if error is not None:
            first_error = first_error or error
        else:
            total += future.result()
    if first_error is not None:
        raise first_error
    logger.info("Workers acknowledged %d tasks.", total)
    return total


__all__ = ["run_workers", "Handler"]
