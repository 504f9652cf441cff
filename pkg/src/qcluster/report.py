"""Deterministic JSON reports (schema ``qcs-report/1``)."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

SCHEMA = "qcs-report/1"
_INT64 = 2 ** 63


def encode(obj: Any) -> Any:
    """JSON-ready copy of ``obj``; integers outside int64 become decimal strings."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, (str, float)):
        return obj
    if isinstance(obj, int):
        return obj if -_INT64 <= obj < _INT64 else str(obj)
    if isinstance(obj, dict):
        return {str(k): encode(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [encode(x) for x in obj]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def new_report(command: str, seed: int, **meta) -> dict:
    return {"schema": SCHEMA, "command": command, "seed": seed, **meta}


def _render(obj, depth: int) -> str:
    pad = " " * depth
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{pad} {json.dumps(k)}: {_render(obj[k], depth + 1)}' for k in sorted(obj)]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, list):
        if all(not isinstance(x, (dict, list)) for x in obj):
            return json.dumps(obj)
        if all(isinstance(x, list) and all(not isinstance(y, (dict, list)) for y in x)
               for x in obj):
            return json.dumps(obj)
        items = [pad + " " + _render(x, depth + 1) for x in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    return json.dumps(obj)


def dumps(report: dict) -> str:
    """Sorted keys; flat lists and lists of flat lists stay on one line."""
    return _render(encode(report), 0) + "\n"


def write(report: dict, path: str | Path | None) -> str:
    text = dumps(report)
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text
