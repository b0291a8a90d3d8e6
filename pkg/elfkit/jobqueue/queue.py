"""
Durable at-least-once task queue on top of the journal.

Dispatch contract:
- tasks are durable before enqueue() returns;
- each worker holds at most one unacknowledged task (prefetch 1);
- a task is done only when its worker acknowledges it; leases of crashed workers
  go back to the queue, so consumers must be idempotent;
- acknowledged tasks leave memory; only their count is kept;
- tasks are grouped in generations; when a sealed generation has no unacked task
  left, the final-task hook runs once for it and may enqueue the next generation.

All state changes are serialised by one re-entrant lock; the hook runs under that
lock so it can enqueue and seal directly.
"""
import heapq
import logging
import threading
import time
from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable, Optional

from elfkit.exceptions import InvalidTaskPayload, JournalError, LeaseError, PrefetchViolation
from elfkit.jobqueue.journal import Journal, Record

logger = logging.getLogger(__name__)

Hook = Callable[[int], None]


class TaskState(str, Enum):
    QUEUED = "queued"
    LEASED = "leased"
    ACKED = "acked"


@dataclass
class Task:
    id: int
    payload: str
    generation: int
    state: TaskState = TaskState.QUEUED
    worker: Optional[str] = None


def _check_payload(payload: str) -> None:
    if not isinstance(payload, str) or not payload.strip():
        raise InvalidTaskPayload("task payload must be a non-empty string")
    if "\n" in payload or "\r" in payload:
        raise InvalidTaskPayload("task payload must be a single line")


def _check_worker(worker: str) -> None:
    if not worker or any(ch.isspace() for ch in worker):
        raise LeaseError(f"worker id must be a non-empty token without spaces, got {worker!r}")


class JobQueue:
    """File-journaled queue; reopening the same path recovers the previous state."""

    def __init__(self, path: str, sync: bool = True):
        self._lock = threading.RLock()
        self._journal = Journal(path, sync=sync)
        self._tasks: dict[int, Task] = {}
        self._queued: list[int] = []
        self._leases: dict[str, int] = {}
        self._lease_started: dict[int, float] = {}
        self._unacked: dict[int, int] = {}
        self._acked = 0
        self._sealed: set[int] = set()
        self._hooked: set[int] = set()
        self._firing: set[int] = set()
        self._hook: Optional[Hook] = None
        self._next_id = 1
        self._generation = 1

        for lineno, record in enumerate(self._journal.records, start=1):
            self._apply(record, lineno)
        # replay leaves leased ids in the heap; a sorted list is a valid heap
        self._queued = sorted(i for i, t in self._tasks.items() if t.state is TaskState.QUEUED)
        self._requeue_dead_leases()

    # ------------------------------------------------------------------
    # Replay
    # ------------------------------------------------------------------
    def _fail(self, lineno: int, record: Record, why: str) -> JournalError:
        return JournalError(f"{self._journal.path}:{lineno}: {record.kind} {record.key}: {why}")

    def _apply(self, record: Record, lineno: int) -> None:
        kind, key, value = record
        if kind == "E":
            if key != self._next_id:
                raise self._fail(lineno, record, f"expected id {self._next_id}")
            self._add_task(key, value)
        elif kind == "S":
            if key != self._generation:
                raise self._fail(lineno, record, f"expected generation {self._generation}")
            self._sealed.add(key)
            self._generation = key + 1
        elif kind == "H":
            self._hooked.add(key)
        else:
            task = self._tasks.get(key)
            if task is None:
                raise self._fail(lineno, record, "unknown or acknowledged task")
            if kind == "L":
                if task.state is not TaskState.QUEUED or value in self._leases:
                    raise self._fail(lineno, record, "lease of a task that is not queued")
                self._mark_leased(task, value)
            elif kind == "A":
                if task.state is not TaskState.LEASED:
                    raise self._fail(lineno, record, "ack of a task that is not leased")
                self._mark_acked(task)
            elif kind == "R":
                if task.state is not TaskState.LEASED:
                    raise self._fail(lineno, record, "requeue of a task that is not leased")
                self._mark_queued(task)

    def _requeue_dead_leases(self) -> None:
        dead = sorted(self._lease_started)
        for task_id in dead:
            task = self._tasks[task_id]
            logger.info("Requeueing task %d left leased by %s.", task_id, task.worker)
            self._journal.append("R", task_id)
            self._mark_queued(task)

    # ------------------------------------------------------------------
    # State transitions (callers hold the lock and have journaled first)
    # ------------------------------------------------------------------
    def _add_task(self, task_id: int, payload: str) -> None:
        self._tasks[task_id] = Task(task_id, payload, self._generation)
        heapq.heappush(self._queued, task_id)
        self._unacked[self._generation] = self._unacked.get(self._generation, 0) + 1
        self._next_id = task_id + 1

    def _mark_leased(self, task: Task, worker: str) -> None:
        task.state = TaskState.LEASED
        task.worker = worker
        self._leases[worker] = task.id
        self._lease_started[task.id] = time.monotonic()

    def _mark_acked(self, task: Task) -> None:
        assert task.worker is not None
        del self._leases[task.worker]
        del self._lease_started[task.id]
        task.state = TaskState.ACKED
        self._unacked[task.generation] -= 1
        del self._tasks[task.id]
        self._acked += 1

    def _mark_queued(self, task: Task) -> None:
        assert task.worker is not None
        del self._leases[task.worker]
        del self._lease_started[task.id]
        task.state = TaskState.QUEUED
        task.worker = None
        heapq.heappush(self._queued, task.id)

    # ------------------------------------------------------------------
    # Public API
    # ------------------------------------------------------------------
    def enqueue(self, payload: str) -> int:
        """Persist a new task in the current generation and return its id."""
        _check_payload(payload)
        with self._lock:
            task_id = self._next_id
            self._journal.append("E", task_id, payload)
            self._add_task(task_id, payload)
            return task_id

    def lease(self, worker: str) -> Optional[Task]:
        """Hand the oldest queued task to `worker`, or None when nothing is queued."""
        _check_worker(worker)
        with self._lock:
            if worker in self._leases:
                raise PrefetchViolation(
                    f"worker {worker} still holds task {self._leases[worker]} unacknowledged"
                )
            if not self._queued:
                return None
            task = self._tasks[self._queued[0]]
            self._journal.append("L", task.id, worker)
            heapq.heappop(self._queued)
            self._mark_leased(task, worker)
            return replace(task)

    def ack(self, worker: str, task_id: int) -> None:
        """Mark a task leased by `worker` as done."""
        with self._lock:
            task = self._tasks.get(task_id)
            if task is None and 0 < task_id < self._next_id:
                raise LeaseError(f"task {task_id} is already acknowledged")
            if task is None:
                raise LeaseError(f"unknown task {task_id}")
            if task.state is not TaskState.LEASED or task.worker != worker:
                raise LeaseError(f"task {task_id} is not leased by worker {worker}")
            self._journal.append("A", task_id)
            self._mark_acked(task)
            self._maybe_fire(task.generation)

    def release(self, worker: str, task_id: int) -> None:
        """Give a leased task back without acknowledging it."""
        with self._lock:
            task = self._tasks.get(task_id)
            if task is None or task.state is not TaskState.LEASED or task.worker != worker:
                raise LeaseError(f"task {task_id} is not leased by worker {worker}")
            self._journal.append("R", task_id)
            self._mark_queued(task)

    def requeue_expired(self, lease_timeout: float) -> list[int]:
        """Return leases older than `lease_timeout` seconds to the queue."""
        now = time.monotonic()
        requeued: list[int] = []
        with self._lock:
            for task_id, started in sorted(self._lease_started.items()):
                if now - started > lease_timeout:
                    task = self._tasks[task_id]
                    logger.warning(
                        "Lease of task %d by %s expired after %.1fs; requeueing.",
                        task_id, task.worker, now - started,
                    )
                    self._journal.append("R", task_id)
                    self._mark_queued(task)
                    requeued.append(task_id)
        return requeued

    def seal(self) -> int:
        """Close the current generation; later enqueues start the next one."""
        with self._lock:
            generation = self._generation
            self._journal.append("S", generation)
            self._sealed.add(generation)
            self._generation = generation + 1
            self._maybe_fire(generation)
            return generation

    def final_task_hook(self, callback: Hook) -> None:
        """
        Register the callback run when a sealed generation is fully acknowledged.

        Generations that drained before registration without a completed hook (a
        crash between the final ack and the callback) fire immediately.
        """
        with self._lock:
            self._hook = callback
            for generation in sorted(self._sealed - self._hooked):
                self._maybe_fire(generation)

    def _maybe_fire(self, generation: int) -> None:
        if (
            self._hook is None
            or generation not in self._sealed
            or generation in self._hooked
            or generation in self._firing
            or self._unacked.get(generation, 0) > 0
        ):
            return
        self._firing.add(generation)
        try:
            self._hook(generation)
        except Exception:
            logger.exception("Final-task hook failed for generation %d.", generation)
        else:
            self._journal.append("H", generation)
            self._hooked.add(generation)
        finally:
            self._firing.discard(generation)

    # ------------------------------------------------------------------
    # Inspection
    # ------------------------------------------------------------------
    @property
    def path(self) -> str:
        return self._journal.path

    @property
    def generation(self) -> int:
        return self._generation

    def is_fresh(self) -> bool:
        """True when the journal has never held a task or a seal."""
        with self._lock:
            return self._next_id == 1 and not self._sealed

    def is_drained(self) -> bool:
        with self._lock:
            return not self._queued and not self._leases

    def hook_done(self, generation: int) -> bool:
        with self._lock:
            return generation in self._hooked

    def tasks(self) -> list[Task]:
        """Copies of the tasks not yet acknowledged, by id."""
        with self._lock:
            return [replace(t) for _, t in sorted(self._tasks.items())]

    def leased_by(self, worker: str) -> Optional[int]:
        with self._lock:
            return self._leases.get(worker)

    def counts(self) -> dict[str, int]:
        with self._lock:
            result = {state.value: 0 for state in TaskState}
            result[TaskState.ACKED.value] = self._acked
            for task in self._tasks.values():
                result[task.state.value] += 1
            return result

    def close(self) -> None:
        """Close the journal file. Writes nothing; abandoning the queue is equivalent."""
        self._journal.close()

    def __enter__(self) -> "JobQueue":
        return self

    def __exit__(self, *exc: object) -> None:
        self.close()


__all__ = ["Task", "TaskState", "JobQueue", "Hook"]
