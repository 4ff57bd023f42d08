"""Row types shared by the study drivers, the cache and the CLI."""
from __future__ import annotations

import zlib
from dataclasses import dataclass

from .fock import Encoding

SWEEP_FIELDS = ("encoding", "n", "r", "theta", "precision", "qfi", "dim_used", "converged", "wall_time_s")
FIT_FIELDS = ("r", "a_coeff", "b_coeff", "residual_sum", "n_min", "n_max")
OPTIMAL_FIELDS = ("encoding", "r", "n_star", "f_star", "scan_upper")
SLOPE_FIELDS = ("gradient", "stderr", "r_lo", "r_hi", "n_fits")
CACHE_FIELDS = SWEEP_FIELDS + ("schedule", "crc32")


def fmt(x) -> str:
    """17 significant digits: enough to round-trip any double."""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float):
        return f"{x:.17g}"
    return str(x)


def parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("true", "1"):
        return True
    if lowered in ("false", "0"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


@dataclass(frozen=True)
class SweepPoint:
    encoding: Encoding
    n: int
    r: float
    qfi: float
    dim_used: int
    converged: bool
    wall_time: float
    theta: float = 0.4
    precision: float = 1e-5

    def key(self, schedule: str):
        return (self.encoding.value, self.n, self.r, self.precision, schedule, self.theta)

    def to_row(self, schedule: str | None = None) -> dict[str, str]:
        row = {
            "encoding": self.encoding.value,
            "n": fmt(self.n),
            "r": fmt(float(self.r)),
            "theta": fmt(float(self.theta)),
            "precision": fmt(float(self.precision)),
            "qfi": fmt(float(self.qfi)),
            "dim_used": fmt(self.dim_used),
            "converged": fmt(self.converged),
            "wall_time_s": fmt(float(self.wall_time)),
        }
        if schedule is not None:
            row["schedule"] = schedule
            row["crc32"] = _checksum(row)
        return row

    def as_dict(self) -> dict:
        return {
            "encoding": self.encoding.value,
            "n": self.n,
            "r": self.r,
            "theta": self.theta,
            "precision": self.precision,
            "qfi": self.qfi,
            "dim_used": self.dim_used,
            "converged": self.converged,
            "wall_time_s": self.wall_time,
        }

    @classmethod
    def from_row(cls, row: dict[str, str]):
        """Parse a sweep row; returns ``(point, schedule)`` where schedule may be None."""
        schedule = row.get("schedule")
        if schedule is not None and row.get("crc32") != _checksum(row):
            raise ValueError("checksum mismatch")
        point = cls(
            encoding=Encoding(row["encoding"]),
            n=int(row["n"]),
            r=float(row["r"]),
            qfi=float(row["qfi"]),
            dim_used=int(row["dim_used"]),
            converged=parse_bool(row["converged"]),
            wall_time=float(row["wall_time_s"]),
            theta=float(row["theta"]),
            precision=float(row["precision"]),
        )
        return point, schedule


def _checksum(row: dict[str, str]) -> str:
    payload = ",".join(row[f] for f in CACHE_FIELDS[:-1])
    return f"{zlib.crc32(payload.encode()):08x}"
