"""Append-only CSV cache of computed values keyed by their full configuration."""

from __future__ import annotations

import csv
import math
import os
import warnings
from dataclasses import dataclass
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Iterator, Union

from .weyl import exponent_to_pair, pair_to_exponent

CACHE_COLUMNS = (
    "kind", "d", "signs", "M", "p_num", "p_den", "q_num", "q_den", "value", "err", "timestamp",
)
CACHE_ENV = "DECOUPLE_CACHE"

Key = tuple


@dataclass(frozen=True)
class CacheRecord:
    """One cached value.  ``q`` is ``None`` for quantities without a ``q``."""

    kind: str
    d: int
    signs: str
    M: int
    p: Union[Fraction, float]
    q: Union[Fraction, float, None]
    value: float
    err: float | None = None
    timestamp: str = ""

    @property
    def key(self) -> Key:
        return (self.kind, self.d, self.signs, self.M, _pair(self.p), _pair(self.q))

    def to_row(self) -> list[str]:
        pn, pd = _pair(self.p)
        qn, qd = _pair(self.q)
        return [
            self.kind, str(self.d), self.signs, str(self.M), pn, pd, qn, qd,
            repr(self.value), "" if self.err is None else repr(self.err), self.timestamp,
        ]

    @classmethod
    def from_row(cls, row: dict) -> "CacheRecord":
        p = pair_to_exponent(int(row["p_num"]), int(row["p_den"]))
        q = None if row["q_den"] == "" else pair_to_exponent(int(row["q_num"]), int(row["q_den"]))
        value = float(row["value"])
        if not math.isfinite(value):
            raise ValueError("non-finite value")
        err = float(row["err"]) if row["err"] else None
        return cls(row["kind"], int(row["d"]), row["signs"], int(row["M"]), p, q, value, err,
                   row.get("timestamp") or "")


def _pair(x) -> tuple[str, str]:
    if x is None:
        return "", ""
    num, den = exponent_to_pair(x)
    return str(num), str(den)


def now_stamp() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def resolve_path(path: str | os.PathLike | None) -> Path | None:
    """Explicit path, else ``$DECOUPLE_CACHE``, else no cache."""
    if path:
        return Path(path)
    env = os.environ.get(CACHE_ENV)
    return Path(env) if env else None


def read_records(path: Path) -> Iterator[CacheRecord]:
    """Rows in file order; malformed rows are skipped with a warning."""
    if not path.exists() or path.stat().st_size == 0:
        return
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or tuple(reader.fieldnames) != CACHE_COLUMNS:
            warnings.warn(f"{path}: unexpected header, cache ignored")
            return
        for line, row in enumerate(reader, start=2):
            try:
                yield CacheRecord.from_row(row)
            except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
                warnings.warn(f"{path}:{line}: skipping malformed row ({exc})")


class Cache:
    """In-memory view of the cache file; later rows win on duplicate keys.

    All writes go through :meth:`put`, which appends a single row.
    """

    def __init__(self, path: Path | None, force: bool = False):
        self.path = path
        self.force = force
        self._rows: dict[Key, CacheRecord] = {}
        if path is not None:
            for rec in read_records(path):
                self._rows[rec.key] = rec

    def __len__(self) -> int:
        return len(self._rows)

    def get(self, key: Key) -> CacheRecord | None:
        if self.force:
            return None
        return self._rows.get(key)

    def put(self, rec: CacheRecord) -> None:
        self._rows[rec.key] = rec
        if self.path is None:
            return
        new = not self.path.exists() or self.path.stat().st_size == 0
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with self.path.open("a", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            if new:
                writer.writerow(CACHE_COLUMNS)
            writer.writerow(rec.to_row())

    def records(self) -> Iterable[CacheRecord]:
        return self._rows.values()
