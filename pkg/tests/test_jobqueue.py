# tests/test_jobqueue.py
import os
import random
import shutil
import tempfile
import threading
import time
import unittest

from elfkit.exceptions import InvalidTaskPayload, JournalError, LeaseError, PrefetchViolation
from elfkit.jobqueue.queue import JobQueue, TaskState
from elfkit.jobqueue.tasks import ModelTask, keyed_payload, parse_keyed_payload
from elfkit.jobqueue.workers import run_workers


class QueueTestCase(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.mkdtemp()
        self.path = os.path.join(self.tmp, "queue.journal")
        self.opened = []

    def tearDown(self):
        for queue in self.opened:
            queue.close()
        shutil.rmtree(self.tmp, ignore_errors=True)

    def open(self, sync=False):
        queue = JobQueue(self.path, sync=sync)
        self.opened.append(queue)
        return queue


class LeaseCase(QueueTestCase):
    def test_oldest_first(self):
        queue = self.open(sync=True)
        ids = [queue.enqueue(f"polygon:{i}") for i in range(3)]
        self.assertEqual(ids, [1, 2, 3])
        task = queue.lease("w1")
        self.assertEqual((task.id, task.payload, task.state), (1, "polygon:0", TaskState.LEASED))
        self.assertEqual(queue.lease("w2").id, 2)
        self.assertEqual(queue.counts(), {"queued": 1, "leased": 2, "acked": 0})

    def test_prefetch_one(self):
        queue = self.open()
        queue.enqueue("a")
        queue.enqueue("b")
        queue.lease("w1")
        with self.assertRaises(PrefetchViolation):
            queue.lease("w1")
        queue.ack("w1", 1)
        self.assertEqual(queue.lease("w1").id, 2)

    def test_empty_queue(self):
        self.assertIsNone(self.open().lease("w1"))

    def test_ack_rules(self):
        queue = self.open()
        queue.enqueue("a")
        queue.lease("w1")
        with self.assertRaises(LeaseError):
            queue.ack("w2", 1)
        with self.assertRaises(LeaseError):
            queue.ack("w1", 9)
        queue.ack("w1", 1)
        with self.assertRaises(LeaseError):
            queue.ack("w1", 1)

    def test_release_returns_task(self):
        queue = self.open()
        queue.enqueue("a")
        queue.enqueue("b")
        queue.lease("w1")
        queue.release("w1", 1)
        self.assertIsNone(queue.leased_by("w1"))
        self.assertEqual(queue.lease("w2").id, 1)

    def test_expired_leases(self):
        queue = self.open()
        queue.enqueue("a")
        queue.lease("w1")
        self.assertEqual(queue.requeue_expired(60.0), [])
        time.sleep(0.02)
        self.assertEqual(queue.requeue_expired(0.001), [1])
        self.assertEqual(queue.counts()["queued"], 1)

    def test_bad_input(self):
        queue = self.open()
        for payload in ("", "   ", "two\nlines"):
            with self.assertRaises(InvalidTaskPayload):
                queue.enqueue(payload)
        with self.assertRaises(LeaseError):
            queue.lease("worker one")
        self.assertTrue(queue.is_fresh())


class RecoveryCase(QueueTestCase):
    def test_reopen_requeues_leases(self):
        queue = self.open()
        for name in "abc":
            queue.enqueue(name)
        queue.lease("w1")
        queue.ack("w1", 1)
        queue.lease("w1")
        queue.close()

        queue = self.open()
        self.assertEqual(queue.counts(), {"queued": 2, "leased": 0, "acked": 1})
        self.assertEqual(queue.lease("w9").id, 2)
        self.assertFalse(queue.is_fresh())

    def test_long_journal_replays_without_acked_tasks(self):
        queue = self.open()
        for i in range(2000):
            queue.enqueue(f"polygon:{i}")
        for _ in range(1500):
            queue.ack("w1", queue.lease("w1").id)
        self.assertNotIn(1, [t.id for t in queue.tasks()])
        queue.lease("w2")
        queue.close()

        queue = self.open()
        self.assertEqual(queue.counts(), {"queued": 500, "leased": 0, "acked": 1500})
        self.assertEqual([t.id for t in queue.tasks()][:2], [1501, 1502])
        self.assertEqual(len(queue.tasks()), 500)
        self.assertEqual(queue.lease("w3").id, 1501)
        with self.assertRaisesRegex(LeaseError, "already acknowledged"):
            queue.ack("w3", 7)

    def test_torn_record_dropped(self):
        queue = self.open()
        queue.enqueue("a")
        queue.close()
        with open(self.path, "ab") as fh:
            fh.write(b"E 2 half-writ")

        with self.assertLogs("elfkit.jobqueue.journal", level="WARNING"):
            queue = self.open()
        self.assertEqual(len(queue.tasks()), 1)
        self.assertEqual(queue.enqueue("b"), 2)
        queue.close()
        with open(self.path, "rb") as fh:
            self.assertEqual(fh.read(), b"E 1 a\nE 2 b\n")

    def test_corrupt_journal(self):
        for text in ("X 1\n", "E 1\n", "E 2 a\n", "E 1 a\nA 1\n", "E 1 a\nL 7 w1\n", "S 2\n"):
            with open(self.path, "w", encoding="utf-8") as fh:
                fh.write(text)
            with self.assertRaises(JournalError, msg=text):
                JobQueue(self.path, sync=False)


class GenerationCase(QueueTestCase):
    def test_hook_runs_once_when_generation_drains(self):
        queue = self.open()
        calls = []
        queue.final_task_hook(calls.append)
        queue.enqueue("a")
        queue.enqueue("b")
        self.assertEqual(queue.seal(), 1)
        for worker in ("w1", "w2"):
            task = queue.lease(worker)
            queue.ack(worker, task.id)
        self.assertEqual(calls, [1])
        self.assertTrue(queue.hook_done(1))
        self.assertEqual(queue.generation, 2)

    def test_hook_enqueues_next_generation(self):
        queue = self.open()
        calls = []

        def hook(generation):
            calls.append(generation)
            if generation == 1:
                queue.enqueue("merge")
                queue.seal()

        queue.final_task_hook(hook)
        queue.enqueue("polygon:0")
        queue.seal()
        queue.ack("w1", queue.lease("w1").id)
        follow_up = queue.lease("w1")
        self.assertEqual((follow_up.payload, follow_up.generation), ("merge", 2))
        queue.ack("w1", follow_up.id)
        self.assertEqual(calls, [1, 2])

    def test_empty_sealed_generation_fires(self):
        queue = self.open()
        calls = []
        queue.final_task_hook(calls.append)
        queue.seal()
        self.assertEqual(calls, [1])

    def test_missed_hook_fires_after_restart(self):
        queue = self.open()
        queue.enqueue("a")
        queue.seal()
        queue.ack("w1", queue.lease("w1").id)
        queue.close()

        queue = self.open()
        calls = []
        queue.final_task_hook(calls.append)
        self.assertEqual(calls, [1])
        queue.close()

        queue = self.open()
        queue.final_task_hook(calls.append)
        self.assertEqual(calls, [1])

    def test_failing_hook_is_retried(self):
        queue = self.open()
        queue.enqueue("a")
        queue.seal()

        def broken(generation):
            raise RuntimeError("disk full")

        queue.final_task_hook(broken)
        with self.assertLogs("elfkit.jobqueue.queue", level="ERROR"):
            queue.ack("w1", queue.lease("w1").id)
        self.assertFalse(queue.hook_done(1))

        calls = []
        queue.final_task_hook(calls.append)
        self.assertEqual(calls, [1])


class ScheduleFuzzCase(QueueTestCase):
    WORKERS = ("w1", "w2", "w3")
    OPS = ("enqueue", "enqueue", "lease", "lease", "ack", "ack", "release", "seal", "restart")

    def run_schedule(self, seed):
        rng = random.Random(seed)
        path = os.path.join(self.tmp, f"schedule-{seed}.journal")
        queue = JobQueue(path, sync=False)
        calls = []
        queue.final_task_hook(calls.append)

        generation_of, queued, leases, acked, sealed = {}, set(), {}, set(), set()
        next_id, generation = 1, 1
        for _ in range(rng.randint(5, 30)):
            op = rng.choice(self.OPS)
            if op == "enqueue":
                self.assertEqual(queue.enqueue(f"polygon:{next_id}"), next_id)
                generation_of[next_id] = generation
                queued.add(next_id)
                next_id += 1
            elif op == "lease":
                worker = rng.choice(self.WORKERS)
                if worker in leases:
                    with self.assertRaises(PrefetchViolation):
                        queue.lease(worker)
                    continue
                task = queue.lease(worker)
                if not queued:
                    self.assertIsNone(task)
                    continue
                self.assertEqual(task.id, min(queued))
                self.assertNotIn(task.id, acked)
                queued.discard(task.id)
                leases[worker] = task.id
            elif op in ("ack", "release") and leases:
                worker, task_id = rng.choice(sorted(leases.items()))
                del leases[worker]
                if op == "ack":
                    queue.ack(worker, task_id)
                    acked.add(task_id)
                else:
                    queue.release(worker, task_id)
                    queued.add(task_id)
            elif op == "seal":
                self.assertEqual(queue.seal(), generation)
                sealed.add(generation)
                generation += 1
            elif op == "restart":
                queue.close()
                queue = JobQueue(path, sync=False)
                queue.final_task_hook(calls.append)
                queued.update(leases.values())
                leases.clear()

            self.assertEqual(
                queue.counts(),
                {"queued": len(queued), "leased": len(leases), "acked": len(acked)},
            )
            drained = {
                g for g in sealed
                if all(t in acked for t, tg in generation_of.items() if tg == g)
            }
            self.assertEqual(sorted(calls), sorted(drained))

        for worker, task_id in sorted(leases.items()):
            queue.ack(worker, task_id)
        while True:
            task = queue.lease("drain")
            if task is None:
                break
            queue.ack("drain", task.id)
        self.assertTrue(queue.is_drained())
        self.assertEqual(queue.tasks(), [])
        self.assertEqual(sorted(calls), sorted(sealed))
        queue.close()

    def test_random_schedules(self):
        for seed in range(1000):
            self.run_schedule(seed)


class WorkersCase(QueueTestCase):
    def test_every_task_handled_once(self):
        queue = self.open()
        for i in range(50):
            queue.enqueue(keyed_payload("polygon", i))
        seen = []
        lock = threading.Lock()

        def handler(task):
            with lock:
                seen.append(parse_keyed_payload(task.payload, "polygon")[0])

        self.assertEqual(run_workers(queue, handler, workers=4), 50)
        self.assertEqual(sorted(seen), list(range(50)))
        self.assertTrue(queue.is_drained())

    def test_task_budget(self):
        queue = self.open()
        for i in range(10):
            queue.enqueue(keyed_payload("tile", 0, i))
        self.assertEqual(run_workers(queue, lambda task: None, workers=1, max_tasks=4), 4)
        self.assertEqual(queue.counts(), {"queued": 6, "leased": 0, "acked": 4})

    def test_failing_handler_releases_task(self):
        queue = self.open()
        for i in range(5):
            queue.enqueue(keyed_payload("polygon", i))

        def handler(task):
            if task.id == 3:
                raise ValueError("bad polygon")

        with self.assertLogs("elfkit.jobqueue.workers", level="ERROR"):
            with self.assertRaises(ValueError):
                run_workers(queue, handler, workers=1)
        self.assertEqual(queue.counts(), {"queued": 3, "leased": 0, "acked": 2})
        self.assertEqual(queue.lease("again").id, 3)


class PayloadCase(unittest.TestCase):
    def test_model_task(self):
        task = ModelTask.parse("8:RGB-NIR-Slope:resnet18")
        self.assertEqual(task, ModelTask("8", "RGB-NIR-Slope", "resnet18"))
        self.assertEqual(task.format(), "8:RGB-NIR-Slope:resnet18")
        for bad in ("8:RGB", "8::resnet18", "a:b:c:d"):
            with self.assertRaises(InvalidTaskPayload):
                ModelTask.parse(bad)

    def test_keyed_payload(self):
        self.assertEqual(keyed_payload("tile", 2, 5), "tile:2:5")
        self.assertEqual(parse_keyed_payload("tile:2:5", "tile", 2), (2, 5))
        for bad, kind in (("tile:2:5", "tile"), ("polygon:x", "polygon"), ("tile:1", "polygon")):
            with self.assertRaises(InvalidTaskPayload):
                parse_keyed_payload(bad, kind)


if __name__ == "__main__":
    unittest.main(verbosity=2)
