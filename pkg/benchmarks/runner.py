from time import perf_counter

from .case_base import BenchmarkCase


class BenchmarkRunner:
    """Runs a list of benchmark cases and prints the mean time per call."""

    def __init__(self, cases, loops: int = 3):
        self.cases = cases
        self.loops = loops

    def _time_call(self, fn):
        t0 = perf_counter()
        result = None
        for _ in range(self.loops):
            result = fn()
        t1 = perf_counter()
        return (t1 - t0) / self.loops, result

    def run(self):
        print("== elfkit benchmark ==")
        for case in self.cases:
            self._run_case(case)

    def _run_case(self, case: BenchmarkCase):
        t0 = perf_counter()
        case.prepare()
        prepare_time = perf_counter() - t0

        run_time, result = self._time_call(case.run_once)
        assert case.check(result), f"Unexpected result for {case.label}"
        print(f"[{case.label}] prepare: {prepare_time:.3f}s | run: {run_time:.3f}s")
