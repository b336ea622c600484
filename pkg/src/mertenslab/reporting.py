"""Deterministic report serialization.

Floats render with 17 significant digits (round-trip exact), integers as
integers, keys sorted, and files are written atomically (temp + rename), so
two runs over identical inputs produce byte-identical artifacts.  NaN and
infinities serialize as JSON null: they mark not-applicable quantities.
"""

from __future__ import annotations

import math
import os
import tempfile

import numpy as np


def fmt_float(v: float) -> str:
    return "%.17g" % float(v)


def _json_scalar(v) -> str:
    if v is None:
        return "null"
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        fv = float(v)
        if not math.isfinite(fv):
            return "null"
        return fmt_float(fv)
    if isinstance(v, str):
        out = v.replace("\\", "\\\\").replace('"', '\\"')
        out = out.replace("\n", "\\n").replace("\r", "\\r").replace("\t", "\\t")
        return f'"{out}"'
    raise TypeError(f"cannot serialize {type(v).__name__} deterministically")


def to_json(obj, indent: int = 0) -> str:
    """Render nested dict/list/scalar structures as deterministic JSON."""
    pad = " " * indent
    inner = " " * (indent + 2)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        parts = []
        for key in sorted(obj):
            parts.append(f'{inner}"{key}": {to_json(obj[key], indent + 2)}')
        return "{\n" + ",\n".join(parts) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        parts = [f"{inner}{to_json(v, indent + 2)}" for v in seq]
        return "[\n" + ",\n".join(parts) + "\n" + pad + "]"
    return _json_scalar(obj)


def write_text_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def csv_cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return fmt_float(float(v))
    return str(v)


def write_csv_atomic(path: str, header: list[str], rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        if isinstance(row, dict):
            lines.append(",".join(csv_cell(row[h]) for h in header))
        else:
            lines.append(",".join(csv_cell(v) for v in row))
    write_text_atomic(path, "\n".join(lines) + "\n")


def write_json_atomic(path: str, obj) -> None:
    write_text_atomic(path, to_json(obj) + "\n")
