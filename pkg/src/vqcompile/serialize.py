"""Deterministic JSON/CSV serialization and atomic file writes.

Reproducibility contract: the same in-memory document always serializes to
the same bytes. Floats are rendered with 17 significant digits (value-exact
for IEEE doubles), dict keys are sorted, and files are written atomically
via a temp-file rename.
"""

from __future__ import annotations

import base64
import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .errors import ConfigError


def format_float(value: float) -> str:
    """Render a float with 17 significant digits (round-trip exact)."""
    if not np.isfinite(value):
        msg = f"non-finite value {value!r} cannot be serialized"
        raise ConfigError(msg)
    return format(float(value), ".17g")


def _render(obj) -> str:
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_render(v) for v in obj) + "]"
    if isinstance(obj, dict):
        items = []
        for key in sorted(obj):
            if not isinstance(key, str):
                msg = f"JSON object keys must be strings, got {key!r}"
                raise ConfigError(msg)
            items.append(json.dumps(key) + ": " + _render(obj[key]))
        return "{" + ", ".join(items) + "}"
    msg = f"cannot serialize object of type {type(obj).__name__}"
    raise ConfigError(msg)


def dumps_json(obj) -> str:
    """Serialize to deterministic JSON text (sorted keys, 17g floats)."""
    return _render(obj) + "\n"


def loads_json(text: str):
    return json.loads(text)


def atomic_write_text(path: str | Path, text: str) -> None:
    """Write ``text`` to ``path`` via a temp file and rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".tmp")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json(path: str | Path, obj) -> None:
    atomic_write_text(path, dumps_json(obj))


def read_json(path: str | Path):
    return loads_json(Path(path).read_text())


def write_csv(path: str | Path, header: list[str], rows: list[list]) -> None:
    """Write a CSV file with deterministic float formatting."""
    lines = [",".join(header)]
    for row in rows:
        cells = []
        for cell in row:
            if cell is None:
                cells.append("")
            elif isinstance(cell, (float, np.floating)):
                cells.append(format_float(float(cell)))
            else:
                cells.append(str(cell))
        lines.append(",".join(cells))
    atomic_write_text(path, "\n".join(lines) + "\n")


def array_to_b64(arr: np.ndarray) -> str:
    """Encode a complex tensor as base64 little-endian (real, imag) f64 pairs.

    The linearization is C-order (row-major) over the tensor's axes.
    """
    data = np.ascontiguousarray(arr, dtype="<c16")
    return base64.b64encode(data.tobytes()).decode("ascii")


def b64_to_array(text: str, shape: list[int]) -> np.ndarray:
    raw = base64.b64decode(text.encode("ascii"))
    arr = np.frombuffer(raw, dtype="<c16").astype(np.complex128)
    expected = int(np.prod(shape)) if shape else 1
    if arr.size != expected:
        msg = f"tensor payload has {arr.size} entries, shape {shape} needs {expected}"
        raise ConfigError(msg)
    return arr.reshape(shape)
