"""Change-log parsing and construction of scalar (count, days) samples."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import IngestError

HEADER = "period,enhancements,corrections,days_enh,days_corr"


class InputVariant(enum.Enum):
    ENHANCEMENTS_ONLY = "enh"
    CORRECTIONS_ONLY = "corr"
    SUM = "sum"


@dataclass(frozen=True)
class MaintenanceRecord:
    period_id: str
    enhancements: int
    corrections: int
    days_enh: float
    days_corr: float

    def __post_init__(self):
        if not self.period_id:
            raise IngestError("period_id must be nonempty")
        for name in ("enhancements", "corrections", "days_enh", "days_corr"):
            v = getattr(self, name)
            if not math.isfinite(v) or v < 0:
                raise IngestError(f"{name} must be a finite nonnegative number, got {v!r}")


@dataclass(frozen=True)
class SamplePair:
    x: float
    y: float


def _parse_line(line: str, lineno: int) -> MaintenanceRecord:
    fields = line.split(",")
    if len(fields) != 5:
        raise IngestError(f"line {lineno}: expected 5 fields, got {len(fields)}")
    period = fields[0].strip()
    if not period:
        raise IngestError(f"line {lineno}: empty period")
    try:
        e = int(fields[1])
        f = int(fields[2])
        de = float(fields[3])
        df = float(fields[4])
    except ValueError as exc:
        raise IngestError(f"line {lineno}: non-numeric field ({exc})") from None
    if e < 0 or f < 0 or not (de >= 0) or not (df >= 0) or math.isinf(de) or math.isinf(df):
        raise IngestError(f"line {lineno}: negative or non-finite value")
    return MaintenanceRecord(period, e, f, de, df)


def parse_change_log(text: str) -> list[MaintenanceRecord]:
    """Parse the five-column change-log CSV.

    The first line must be exactly the header. LF and CRLF endings are both
    accepted and a single trailing blank line is tolerated. Errors name the
    1-based line number.
    """
    lines = text.split("\n")
    lines = [ln[:-1] if ln.endswith("\r") else ln for ln in lines]
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or lines[0] != HEADER:
        raise IngestError(f"line 1: header must be exactly {HEADER!r}")

    records: list[MaintenanceRecord] = []
    seen: set[str] = set()
    for lineno, line in enumerate(lines[1:], start=2):
        rec = _parse_line(line, lineno)
        if rec.period_id in seen:
            raise IngestError(f"line {lineno}: duplicate period_id {rec.period_id!r}")
        seen.add(rec.period_id)
        records.append(rec)
    return records


def _fmt_days(v: float) -> str:
    return str(int(v)) if float(v).is_integer() else repr(float(v))


def format_change_log(records: Iterable[MaintenanceRecord]) -> str:
    """Serialize records back to the change-log CSV (LF endings, trailing newline)."""
    out = [HEADER]
    for r in records:
        out.append(
            f"{r.period_id},{r.enhancements},{r.corrections},"
            f"{_fmt_days(r.days_enh)},{_fmt_days(r.days_corr)}"
        )
    return "\n".join(out) + "\n"


def build_samples(
    records: Sequence[MaintenanceRecord], variant: InputVariant
) -> list[SamplePair]:
    if not records:
        raise IngestError("cannot build samples from an empty record list")
    if variant is InputVariant.SUM:
        return [
            SamplePair(float(r.enhancements + r.corrections), float(r.days_enh + r.days_corr))
            for r in records
        ]
    if variant is InputVariant.ENHANCEMENTS_ONLY:
        return [SamplePair(float(r.enhancements), float(r.days_enh)) for r in records]
    if variant is InputVariant.CORRECTIONS_ONLY:
        return [SamplePair(float(r.corrections), float(r.days_corr)) for r in records]
    raise IngestError(f"unknown input variant {variant!r}")
