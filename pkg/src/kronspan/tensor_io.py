"""Sparse tensor text format and its JSON mirror.

Text::

    dims a b c
    field 101          # or: field Q
    i j k value        # one line per nonzero, value an integer or num/den

JSON::

    {"dims": [a, b, c], "field": "101", "entries": [[i, j, k, "value"], ...]}
"""

from __future__ import annotations

import json
from pathlib import Path

from kronspan.fields import field_from_tag
from kronspan.tensor import SparseTensor3


class TensorFormatError(ValueError):
    pass


def dumps_text(t: SparseTensor3) -> str:
    lines = ["dims {} {} {}".format(*t.dims), f"field {t.field.tag}"]
    for (i, j, k), v in t.entries.items():
        lines.append(f"{i} {j} {k} {t.field.format(v)}")
    return "\n".join(lines) + "\n"


def loads_text(text: str) -> SparseTensor3:
    dims = field = None
    entries = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "dims":
            if len(parts) != 4:
                raise TensorFormatError(f"line {lineno}: expected 'dims a b c'")
            dims = tuple(int(x) for x in parts[1:])
        elif parts[0] == "field":
            if len(parts) != 2:
                raise TensorFormatError(f"line {lineno}: expected 'field p' or 'field Q'")
            field = field_from_tag(parts[1])
        else:
            if dims is None or field is None:
                raise TensorFormatError(f"line {lineno}: entry before header")
            if len(parts) != 4:
                raise TensorFormatError(f"line {lineno}: expected 'i j k value'")
            i, j, k = (int(x) for x in parts[:3])
            entries.append(((i, j, k), field(parts[3])))
    if dims is None or field is None:
        raise TensorFormatError("missing 'dims' or 'field' header")
    return SparseTensor3(dims, entries, field)


def to_json_obj(t: SparseTensor3) -> dict:
    return {
        "dims": list(t.dims),
        "field": t.field.tag,
        "entries": [[i, j, k, t.field.format(v)] for (i, j, k), v in t.entries.items()],
    }


def from_json_obj(obj: dict) -> SparseTensor3:
    try:
        field = field_from_tag(obj["field"])
        entries = [((int(i), int(j), int(k)), field(str(v))) for i, j, k, v in obj["entries"]]
        return SparseTensor3(obj["dims"], entries, field)
    except (KeyError, TypeError, ValueError) as exc:
        raise TensorFormatError(f"malformed tensor JSON: {exc}") from exc


def dumps_json(t: SparseTensor3) -> str:
    return json.dumps(to_json_obj(t))


def loads_json(text: str) -> SparseTensor3:
    return from_json_obj(json.loads(text))


def read_tensor(path: str | Path) -> SparseTensor3:
    text = Path(path).read_text()
    if text.lstrip().startswith("{"):
        return loads_json(text)
    return loads_text(text)


def write_tensor(t: SparseTensor3, path: str | Path) -> None:
    path = Path(path)
    path.write_text(dumps_json(t) if path.suffix == ".json" else dumps_text(t))
