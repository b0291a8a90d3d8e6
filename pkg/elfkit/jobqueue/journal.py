"""
Append-only journal of queue events.

One record per line, fields separated by a single space:

    E <id> <payload>   task enqueued
    L <id> <worker>    task leased to a worker
    A <id>             task acknowledged (terminal)
    R <id>             lease returned to the queue (expired, dead or released)
    S <gen>            generation sealed
    H <gen>            final-task hook of a generation completed

Every record is flushed (and fsync'd unless disabled) before append() returns. A
trailing record without its newline is a torn write from a crash; it is dropped
and truncated away when the journal is opened.
"""
import logging
import os
from typing import NamedTuple

from elfkit.exceptions import JournalError

logger = logging.getLogger(__name__)

RECORD_KINDS = frozenset("ELARSH")
_NEEDS_VALUE = frozenset("EL")


class Record(NamedTuple):
    kind: str
    key: int
    value: str = ""


def _parse(line: str, lineno: int, path: str) -> Record:
    parts = line.split(" ", 2)
    kind = parts[0]
    if kind not in RECORD_KINDS or len(parts) < 2:
        raise JournalError(f"{path}:{lineno}: unknown record {line!r}")
    try:
        key = int(parts[1])
    except ValueError as exc:
        raise JournalError(f"{path}:{lineno}: bad id in {line!r}") from exc
    value = parts[2] if len(parts) == 3 else ""
    if kind in _NEEDS_VALUE and not value:
        raise JournalError(f"{path}:{lineno}: record {kind} needs a value")
    return Record(kind, key, value)


class Journal:
    """File-backed record log. Not thread safe on its own; JobQueue serialises access."""

    def __init__(self, path: str, sync: bool = True):
        self.path = path
        self.sync = sync
        os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
        self.records: list[Record] = self._load()
        try:
            self._fh = open(path, "ab")
        except OSError as exc:
            raise JournalError(f"cannot open journal {path}: {exc}") from exc

    def _load(self) -> list[Record]:
        if not os.path.exists(self.path):
            return []
        with open(self.path, "rb") as fh:
            blob = fh.read()

        complete = blob.rfind(b"\n") + 1
        if complete < len(blob):
            logger.warning(
                "Journal %s ends in a torn record (%d bytes); discarding it.",
                self.path,
                len(blob) - complete,
            )
            with open(self.path, "r+b") as fh:
                fh.truncate(complete)
                fh.flush()
                os.fsync(fh.fileno())

        text = blob[:complete].decode("utf-8")
        return [
            _parse(line, lineno, self.path)
            for lineno, line in enumerate(text.splitlines(), start=1)
            if line
        ]

    def append(self, kind: str, key: int, value: str = "") -> None:
        if kind not in RECORD_KINDS:
            raise JournalError(f"unknown record kind {kind!r}")
        line = f"{kind} {key} {value}\n" if value else f"{kind} {key}\n"
        try:
            self._fh.write(line.encode("utf-8"))
            self._fh.flush()
            if self.sync:
                os.fsync(self._fh.fileno())
        except (OSError, ValueError) as exc:
            raise JournalError(f"journal write failed ({self.path}): {exc}") from exc

    def close(self) -> None:
        if not self._fh.closed:
            self._fh.close()


__all__ = ["Record", "Journal", "RECORD_KINDS"]
