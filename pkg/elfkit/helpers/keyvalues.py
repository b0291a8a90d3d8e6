# elfkit/helpers/keyvalues.py
import os
from typing import Iterable

from dotenv import dotenv_values


def write_key_values(path: str, items: Iterable[tuple[str, object]]) -> str:
    """Write upper-case KEY=value lines; keys must be single tokens."""
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        for key, value in items:
            if not key.isupper() or any(ch.isspace() for ch in key):
                raise ValueError(f"manifest key must be an upper-case token, got {key!r}")
            fh.write(f"{key}={value}\n")
    return path


def read_key_values(path: str) -> dict[str, str]:
    """Values of a KEY=value file, without variable interpolation."""
    return {k: v for k, v in dotenv_values(path, interpolate=False).items() if v is not None}
