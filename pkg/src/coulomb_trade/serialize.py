"""Deterministic JSON and TSV output.

Floats are written with 17 significant digits so reports are byte-stable
and round-trip exactly. Infinite values become the string ``"inf"``; NaN
becomes ``null``.
"""

from __future__ import annotations

import json
import math
from collections.abc import Iterable, Mapping, Sequence
from pathlib import Path


def fmt_float(v: float) -> str:
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return format(v, ".17g")


def _encode(obj, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        if math.isnan(obj):
            return "null"
        if math.isinf(obj):
            return json.dumps(fmt_float(obj))
        text = format(obj, ".17g")
        if "e" not in text and "." not in text:
            text += ".0"
        return text
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, Mapping):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [pad + _encode(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if hasattr(obj, "item"):  # numpy scalar
        return _encode(obj.item(), indent, level)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    return _encode(obj, indent, 0) + "\n"


def write_json(obj, path: str | Path) -> None:
    Path(path).write_text(dumps(obj), encoding="utf-8")


def tsv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    lines = ["\t".join(header)]
    for row in rows:
        lines.append("\t".join(fmt_float(v) if isinstance(v, float) else str(v) for v in row))
    return "\n".join(lines) + "\n"


def write_tsv(header: Sequence[str], rows: Iterable[Sequence], path: str | Path) -> None:
    Path(path).write_text(tsv_text(header, rows), encoding="utf-8")


def check_tsv(text: str, numeric_from: int = 0) -> int:
    """Validate plot TSV: constant column count, numeric cells after
    ``numeric_from``. Returns the number of data rows."""
    lines = text.rstrip("\n").split("\n")
    width = len(lines[0].split("\t"))
    for i, line in enumerate(lines[1:], start=2):
        cells = line.split("\t")
        if len(cells) != width:
            raise ValueError(f"line {i}: {len(cells)} columns, expected {width}")
        for c in cells[numeric_from:]:
            float(c)
    return len(lines) - 1
