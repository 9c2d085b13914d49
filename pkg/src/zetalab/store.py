"""Append-only checkpoint store for expensive integrals.

One record per line, tab separated::

    v1  kind  fingerprint  upper  tol  value  error  params-json  crc32

Floats are written with ``repr`` so they round-trip exactly.  A line whose
checksum or field count is wrong marks the end of the valid data: the file is
truncated there and a warning is issued.
"""

from __future__ import annotations

import contextlib
import contextvars
import fcntl
import hashlib
import json
import os
import warnings
import zlib
from pathlib import Path
from typing import Callable, Iterator, Optional

_VERSION = "v1"
_FIELDS = 9

CACHE_ENV = "ZETALAB_CACHE"


def fingerprint(params: dict) -> str:
    return hashlib.sha256(_echo(params).encode()).hexdigest()[:16]


def _echo(params: dict) -> str:
    return json.dumps(params, sort_keys=True, separators=(",", ":"))


class CheckpointStore:
    def __init__(self, path: str | os.PathLike):
        self.path = Path(path)
        self._lock_path = self.path.with_name(self.path.name + ".lock")
        self._table: dict[tuple[str, str, str, str], tuple[float, float]] = {}
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self.path.touch(exist_ok=True)
        with self._locked():
            self._load()

    @contextlib.contextmanager
    def _locked(self) -> Iterator[None]:
        with open(self._lock_path, "a") as fh:
            fcntl.flock(fh, fcntl.LOCK_EX)
            try:
                yield
            finally:
                fcntl.flock(fh, fcntl.LOCK_UN)

    def _load(self) -> None:
        raw = self.path.read_bytes()
        valid_end = 0
        pos = 0
        while pos < len(raw):
            nl = raw.find(b"\n", pos)
            if nl < 0:
                break
            line = raw[pos:nl].decode("utf-8", errors="replace")
            rec = _parse(line)
            if rec is None:
                break
            kind, _, upper, tol, value, error, echo = rec
            self._table[(kind, echo, upper, tol)] = (value, error)
            pos = nl + 1
            valid_end = pos
        if valid_end < len(raw):
            warnings.warn(
                f"checkpoint store {self.path} damaged after byte {valid_end}; truncating",
                RuntimeWarning,
                stacklevel=3,
            )
            with open(self.path, "r+b") as fh:
                fh.truncate(valid_end)

    def __len__(self) -> int:
        return len(self._table)

    def lookup(self, kind: str, params: dict, upper: float, tol: float) -> Optional[tuple[float, float]]:
        return self._table.get((kind, _echo(params), repr(float(upper)), repr(float(tol))))

    def put(self, kind: str, params: dict, upper: float, tol: float, value: float, error: float) -> None:
        echo = _echo(params)
        key = (kind, echo, repr(float(upper)), repr(float(tol)))
        if key in self._table:
            return
        body = "\t".join([
            _VERSION, kind, fingerprint(params), key[2], key[3],
            repr(float(value)), repr(float(error)), echo,
        ])
        line = f"{body}\t{zlib.crc32(body.encode()):08x}\n"
        with self._locked():
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(line)
                fh.flush()
                os.fsync(fh.fileno())
        self._table[key] = (float(value), float(error))


def _parse(line: str):
    parts = line.split("\t")
    if len(parts) != _FIELDS or parts[0] != _VERSION:
        return None
    body = "\t".join(parts[:-1])
    try:
        if int(parts[-1], 16) != zlib.crc32(body.encode()):
            return None
        value = float(parts[5])
        error = float(parts[6])
        params = json.loads(parts[7])
    except ValueError:
        return None
    if fingerprint(params) != parts[2]:
        return None
    return parts[1], parts[2], parts[3], parts[4], value, error, parts[7]


_active: contextvars.ContextVar[Optional[CheckpointStore]] = contextvars.ContextVar(
    "zetalab_store", default=None
)


def active_store() -> Optional[CheckpointStore]:
    return _active.get()


@contextlib.contextmanager
def use_store(store: Optional[CheckpointStore]) -> Iterator[Optional[CheckpointStore]]:
    token = _active.set(store)
    try:
        yield store
    finally:
        _active.reset(token)


def cached(
    kind: str, params: dict, upper: float, tol: float, compute: Callable[[], tuple[float, float]]
) -> tuple[float, float, bool]:
    """Return (value, error, hit) through the active store, computing on a miss."""
    store = active_store()
    if store is not None:
        hit = store.lookup(kind, params, upper, tol)
        if hit is not None:
            return hit[0], hit[1], True
    value, error = compute()
    if store is not None:
        store.put(kind, params, upper, tol, value, error)
    return value, error, False
