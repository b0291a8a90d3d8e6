from abc import ABC, abstractmethod


class BenchmarkCase(ABC):
    """One timed workload; `prepare` runs once, `run_once` is what gets timed."""

    def prepare(self) -> None:
        pass

    @abstractmethod
    def run_once(self) -> object: ...

    @abstractmethod
    def check(self, result: object) -> bool: ...

    @property
    @abstractmethod
    def label(self) -> str: ...
