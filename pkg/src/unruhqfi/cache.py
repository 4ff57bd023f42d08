"""Append-only on-disk store of converged sweep points.

One CSV line per record.  Floats are written with 17 significant digits, so
a read returns exactly the doubles that were written.  Appends take an
exclusive ``flock`` and go out in a single ``write`` call, so several
processes can share one file.
"""
from __future__ import annotations

import csv
import fcntl
import io
import logging
import os
from pathlib import Path

from .records import CACHE_FIELDS, SweepPoint

logger = logging.getLogger(__name__)


def cache_key(encoding, n, r, precision, schedule, theta):
    """Everything that can change a stored value bit-for-bit."""
    return (str(getattr(encoding, "value", encoding)), int(n), float(r), float(precision), str(schedule), float(theta))


class ResultCache:
    def __init__(self, path):
        self.path = Path(path)
        self._memo: dict | None = None
        self._size = -1

    def _load(self) -> dict:
        try:
            size = self.path.stat().st_size
        except FileNotFoundError:
            return {}
        if self._memo is not None and size == self._size:
            return self._memo
        records = {}
        with open(self.path, newline="") as fh:
            fcntl.flock(fh, fcntl.LOCK_SH)
            try:
                text = fh.read()
            finally:
                fcntl.flock(fh, fcntl.LOCK_UN)
        reader = csv.reader(io.StringIO(text))
        header = next(reader, None)
        if header != list(CACHE_FIELDS):
            logger.warning("cache %s has an unexpected header; ignoring it", self.path)
            return {}
        for lineno, row in enumerate(reader, start=2):
            try:
                point, schedule = SweepPoint.from_row(dict(zip(CACHE_FIELDS, row, strict=True)))
            except (ValueError, KeyError, TypeError):
                logger.warning("cache %s: skipping corrupt line %d", self.path, lineno)
                continue
            records[point.key(schedule)] = point
        self._memo, self._size = records, size
        return records

    def get(self, key):
        return self._load().get(key)

    def put(self, point: SweepPoint, schedule: str):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        row = point.to_row(schedule)
        writer.writerow([row[f] for f in CACHE_FIELDS])
        line = buf.getvalue()
        self.path.parent.mkdir(parents=True, exist_ok=True)
        fd = os.open(self.path, os.O_WRONLY | os.O_APPEND | os.O_CREAT, 0o644)
        try:
            fcntl.flock(fd, fcntl.LOCK_EX)
            if os.fstat(fd).st_size == 0:
                line = ",".join(CACHE_FIELDS) + "\n" + line
            os.write(fd, line.encode())
        finally:
            fcntl.flock(fd, fcntl.LOCK_UN)
            os.close(fd)


class NullCache:
    def get(self, key):
        return None

    def put(self, point, schedule):
        pass
