"""Task payload formats."""
from dataclasses import dataclass

from elfkit.exceptions import InvalidTaskPayload

SEPARATOR = ":"


@dataclass(frozen=True)
class ModelTask:
    """
    Inference task in the "searchWindow:dataComposition:modelName" format,
    e.g. "8:RGB-NIR-Slope:resnet18".
    """

    search_window: str
    data_composition: str
    model_name: str

    @classmethod
    def parse(cls, payload: str) -> "ModelTask":
        fields = payload.split(SEPARATOR)
        if len(fields) != 3 or not all(f.strip() for f in fields):
            raise InvalidTaskPayload(
                f"expected searchWindow:dataComposition:modelName, got {payload!r}"
            )
        return cls(*(f.strip() for f in fields))

    def format(self) -> str:
        return SEPARATOR.join((self.search_window, self.data_composition, self.model_name))


def keyed_payload(kind: str, *keys: int) -> str:
    """Internal payloads such as "polygon:3" or "tile:2:5"."""
    return SEPARATOR.join([kind, *(str(k) for k in keys)])


def parse_keyed_payload(payload: str, kind: str, arity: int = 1) -> tuple[int, ...]:
    fields = payload.split(SEPARATOR)
    if len(fields) != arity + 1 or fields[0] != kind:
        raise InvalidTaskPayload(f"expected {kind} payload with {arity} key(s), got {payload!r}")
    try:
        return tuple(int(f) for f in fields[1:])
    except ValueError as exc:
        raise InvalidTaskPayload(f"non-integer key in {payload!r}") from exc


__all__ = ["ModelTask", "keyed_payload", "parse_keyed_payload"]
