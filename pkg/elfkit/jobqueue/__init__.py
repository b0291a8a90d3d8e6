from elfkit.jobqueue.queue import JobQueue, Task, TaskState
from elfkit.jobqueue.tasks import ModelTask, keyed_payload, parse_keyed_payload
from elfkit.jobqueue.workers import run_workers

__all__ = [
    "JobQueue",
    "Task",
    "TaskState",
    "ModelTask",
    "keyed_payload",
    "parse_keyed_payload",
    "run_workers",
]
