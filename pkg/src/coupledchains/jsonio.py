"""Deterministic JSON serialization with controlled float formatting.

The stdlib encoder always renders floats with ``repr``, which emits anywhere
from 1 to 17 significant digits.  Reports in this package fix the float format
instead (15 significant digits for reports, 17 for model files) so output is
stable under a read/re-serialize round trip: a ``%.15g`` string parses to a
double whose nearest 15-digit decimal is that same string.
"""

from __future__ import annotations

import math

__all__ = ["dumps", "dump_path"]


def _format_float(value: float, float_format: str) -> str:
    if math.isnan(value) or math.isinf(value):
        raise ValueError(f"non-finite float {value!r} cannot be serialized to JSON")
    if value == int(value) and abs(value) < 1e16:
        # keep integral floats readable and stable ("2.0", not "2")
        return f"{value:.1f}"
    return format(value, float_format)


def _escape(text: str) -> str:
    out = ['"']
    for ch in text:
        if ch == '"':
            out.append('\\"')
        elif ch == "\\":
            out.append("\\\\")
        elif ch == "\n":
            out.append("\\n")
        elif ch == "\t":
            out.append("\\t")
        elif ch == "\r":
            out.append("\\r")
        elif ord(ch) < 0x20:
            out.append(f"\\u{ord(ch):04x}")
        else:
            out.append(ch)
    out.append('"')
    return "".join(out)


def _write(obj, parts: list[str], float_format: str, indent: int, level: int) -> None:
    pad = " " * (indent * (level + 1))
    closing_pad = " " * (indent * level)
    if obj is None:
        parts.append("null")
    elif obj is True:
        parts.append("true")
    elif obj is False:
        parts.append("false")
    elif isinstance(obj, str):
        parts.append(_escape(obj))
    elif isinstance(obj, int):
        parts.append(str(obj))
    elif isinstance(obj, float):
        parts.append(_format_float(obj, float_format))
    elif isinstance(obj, dict):
        if not obj:
            parts.append("{}")
            return
        parts.append("{\n")
        for i, (key, value) in enumerate(obj.items()):
            if not isinstance(key, str):
                raise TypeError(f"JSON object keys must be strings, got {key!r}")
            parts.append(pad)
            parts.append(_escape(key))
            parts.append(": ")
            _write(value, parts, float_format, indent, level + 1)
            parts.append(",\n" if i + 1 < len(obj) else "\n")
        parts.append(closing_pad + "}")
    elif isinstance(obj, (list, tuple)):
        if not len(obj):
            parts.append("[]")
            return
        parts.append("[\n")
        for i, value in enumerate(obj):
            parts.append(pad)
            _write(value, parts, float_format, indent, level + 1)
            parts.append(",\n" if i + 1 < len(obj) else "\n")
        parts.append(closing_pad + "]")
    else:
        # numpy scalars and similar duck-typed numbers
        if hasattr(obj, "item"):
            _write(obj.item(), parts, float_format, indent, level)
        else:
            raise TypeError(f"cannot serialize {type(obj).__name__} to JSON")


def dumps(obj, *, float_format: str = ".15g", indent: int = 2) -> str:
    """Serialize with fixed field order (dict insertion order) and float format."""
    parts: list[str] = []
    _write(obj, parts, float_format, indent, 0)
    return "".join(parts)


def dump_path(obj, path: str, *, float_format: str = ".15g", indent: int = 2) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(dumps(obj, float_format=float_format, indent=indent) + "\n")
