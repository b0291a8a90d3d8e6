import argparse

from .cases import FindElfsCase, IdwCase, RefineCase
from .runner import BenchmarkRunner

CASES = {
    "search": lambda: [FindElfsCase(400.0), FindElfsCase(800.0)],
    "idw": lambda: [IdwCase(50_000, 250.0), IdwCase(200_000, 500.0)],
    "refine": lambda: [RefineCase(512), RefineCase(1024)],
}


def run_profiles(names, loops):
    cases = [case for name in names for case in CASES[name]()]
    runner = BenchmarkRunner(cases, loops=loops)
    runner.run()


if __name__ == "__main__":
    parser = argparse.ArgumentParser()
    parser.add_argument(
        "--case", action="append", choices=sorted(CASES),
        help="Benchmark to run (repeatable); all of them by default"
    )
    parser.add_argument("--loops", type=int, default=3, help="Timed calls per case")
    args = parser.parse_args()

    run_profiles(args.case or sorted(CASES), args.loops)
