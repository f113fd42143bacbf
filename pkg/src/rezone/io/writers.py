"""Deterministic CSV/JSON serialization with embedded metadata, atomic file
writes, and the companion readers used for round-trip checks.

Floats are serialized with repr (shortest round-trip decimal), so reading
back reproduces the exact binary values.
"""
from __future__ import annotations

import io
import json
import os
import tempfile
from typing import Any, Iterable, Sequence

VERSION = "0.1.0"


def format_float(x: float) -> str:
    return repr(float(x))


def metadata_lines(metadata: dict[str, Any]) -> list[str]:
    lines = [f"# rezone {VERSION}"]
    for key in sorted(metadata):
        lines.append(f"# {key} = {metadata[key]}")
    return lines


def render_csv(
    header: Sequence[str],
    rows: Iterable[Sequence[Any]],
    metadata: dict[str, Any] | None = None,
) -> str:
    buf = io.StringIO()
    for line in metadata_lines(metadata or {}):
        buf.write(line + "\n")
    buf.write(",".join(header) + "\n")
    for row in rows:
        cells = [
            format_float(cell) if isinstance(cell, float) else str(cell)
            for cell in row
        ]
        buf.write(",".join(cells) + "\n")
    return buf.getvalue()


def parse_csv(text: str) -> tuple[list[str], list[list[str]], dict[str, str]]:
    """Split a rendered CSV back into header, raw string rows, and metadata."""
    meta: dict[str, str] = {}
    header: list[str] | None = None
    rows: list[list[str]] = []
    for line in text.splitlines():
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if "=" in body:
                key, value = body.split("=", 1)
                meta[key.strip()] = value.strip()
            continue
        if header is None:
            header = line.split(",")
        else:
            rows.append(line.split(","))
    return header or [], rows, meta


def render_json(payload: dict[str, Any], metadata: dict[str, Any] | None = None) -> str:
    document = {"metadata": {"version": VERSION, **(metadata or {})}}
    document.update(payload)
    return json.dumps(document, sort_keys=True, separators=(",", ":"), default=_json_default) + "\n"


def _json_default(obj: Any):
    try:
        import numpy as np

        if isinstance(obj, np.ndarray):
            return obj.tolist()
        if isinstance(obj, (np.floating, np.integer, np.bool_)):
            return obj.item()
    except ImportError:  # pragma: no cover
        pass
    raise TypeError(f"cannot serialize {type(obj)!r}")


def atomic_write(path: str, text: str) -> None:
    """Write via a sibling temp file plus rename; an existing file is never
    left partially overwritten."""
    directory = os.path.dirname(os.path.abspath(path)) or "."
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".rezone-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
