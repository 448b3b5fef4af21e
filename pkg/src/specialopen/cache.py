"""Content-addressed on-disk cache for homology results."""

from __future__ import annotations

import hashlib
import json
import os
import warnings
from pathlib import Path

from .homology import ChainComplex, HomologySummary

ENV_VAR = "SPECIALOPEN_CACHE_DIR"
FORMAT = 1


def complex_key(cc: ChainComplex, **params) -> str:
    """Hash of the boundary data plus computation parameters."""
    h = hashlib.sha256()
    h.update(json.dumps({"fmt": FORMAT, "params": params, "ranks": cc.ranks,
                         "truncated": cc.truncated}, sort_keys=True).encode())
    for n in range(1, cc.top + 1):
        h.update(f"|{n}|".encode())
        for c in sorted(cc.boundaries[n].cols):
            col = cc.boundaries[n].cols[c]
            h.update(f"{c}:".encode())
            h.update(",".join(f"{r}={col[r]}" for r in sorted(col)).encode())
            h.update(b";")
    return h.hexdigest()


def _digest(payload: dict) -> str:
    return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()


class HomologyCache:
    """Stores homology records under content hashes.

    A record is a JSON-able dict whose ``"homology"`` entry is a
    ``HomologySummary`` in dict form.  Entries carry a checksum; anything
    unreadable or inconsistent is treated as a miss and overwritten on the
    next store.
    """

    def __init__(self, directory: str | Path | None):
        self.directory = None
        self.hits = 0
        self.misses = 0
        if directory is None:
            return
        path = Path(directory)
        try:
            path.mkdir(parents=True, exist_ok=True)
            probe = path / ".probe"
            probe.write_text("ok")
            probe.unlink()
        except OSError as exc:
            warnings.warn(f"cache directory {path} is not writable ({exc}); caching disabled")
            return
        self.directory = path

    @classmethod
    def from_env(cls, directory: str | Path | None = None) -> "HomologyCache":
        return cls(directory if directory is not None else os.environ.get(ENV_VAR))

    @property
    def enabled(self) -> bool:
        return self.directory is not None

    def _path(self, key: str) -> Path:
        return self.directory / key[:2] / f"{key}.json"

    def lookup(self, key: str) -> dict | None:
        if not self.enabled:
            return None
        path = self._path(key)
        try:
            entry = json.loads(path.read_text())
            if entry.get("key") != key or entry.get("check") != _digest(entry["result"]):
                raise ValueError("checksum mismatch")
            result = entry["result"]
            HomologySummary.from_dict(result["homology"])
            if not isinstance(result["reduced_cells"], int):
                raise ValueError("bad record")
        except (OSError, ValueError, KeyError, TypeError):
            self.misses += 1
            return None
        self.hits += 1
        return result

    def store(self, key: str, record: dict) -> None:
        if not self.enabled:
            return
        payload = record
        entry = {"key": key, "result": payload, "check": _digest(payload)}
        path = self._path(key)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            tmp = path.with_suffix(".tmp")
            tmp.write_text(json.dumps(entry, sort_keys=True))
            os.replace(tmp, path)
        except OSError as exc:
            warnings.warn(f"cache write failed ({exc}); caching disabled")
            self.directory = None
