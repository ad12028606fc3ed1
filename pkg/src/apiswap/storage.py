"""Deterministic JSON/JSONL persistence helpers.

Every artifact the pipeline writes goes through these functions so that
re-running a stage over identical inputs produces byte-identical files:
keys are sorted, separators are fixed, and writes are atomic
(temp file + rename) so an interrupted run never leaves a half-written
output behind.
"""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path
from typing import Any, Iterable, Iterator


def canonical_json(obj: Any) -> str:
    """Render *obj* to the one canonical JSON form used everywhere."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def atomic_write_text(path: str | Path, text: str) -> None:
    """Write *text* to *path* so readers never observe a partial file."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=str(path.parent), prefix=path.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def dump_jsonl(path: str | Path, records: Iterable[dict]) -> int:
    """Write one canonical-JSON object per line; returns the record count."""
    lines = [canonical_json(r) for r in records]
    atomic_write_text(path, "".join(line + "\n" for line in lines))
    return len(lines)


def load_jsonl(path: str | Path) -> Iterator[dict]:
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                yield json.loads(line)


def dump_json(path: str | Path, obj: Any) -> None:
    atomic_write_text(path, canonical_json(obj) + "\n")


def load_json(path: str | Path) -> Any:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)
