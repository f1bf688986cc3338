"""Raw time series -> aligned monthly signals -> discrete toggle sequences.

The ingestion pipeline mirrors how real-world input data is wired into a
model: raw observations (daily, monthly, or yearly) are aggregated to one
value per calendar month, optionally extended past the last observation
(periodic repeat of the trailing window, or hold-last), binned uniformly
over the series' own historical [min, max] range into L levels, and
finally collapsed into a value-toggle sequence (one toggle per change,
step = month index).
"""
from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, replace
from datetime import date
from typing import Optional, Sequence

Cadence = str  # "daily" | "monthly" | "yearly"


@dataclass(frozen=True)
class RawSeries:
    element: str
    observations: tuple[tuple[date, float], ...]
    cadence: Cadence

    def __post_init__(self):
        prev: Optional[date] = None
        for d, v in self.observations:
            if prev is not None and d <= prev:
                raise ValueError(f"dates must be strictly increasing (at {d})")
            prev = d
            if not math.isfinite(v):
                raise ValueError(f"non-finite value at {d}")


@dataclass(frozen=True)
class AlignedSeries:
    element: str
    start: tuple[int, int]  # (year, month)
    values: tuple[float, ...]


class IngestError(ValueError):
    pass


def _month_index(d: date) -> int:
    return d.year * 12 + (d.month - 1)


def infer_cadence(observations: Sequence[tuple[date, float]]) -> Cadence:
    """Guess the native cadence from the median gap between observations."""
    if len(observations) < 2:
        return "monthly"
    gaps = sorted(
        (b[0] - a[0]).days for a, b in zip(observations, observations[1:])
    )
    median = gaps[len(gaps) // 2]
    if median <= 2:
        return "daily"
    if median <= 32:
        return "monthly"
    return "yearly"


def read_raw_csv(text: str, element: str, cadence: Optional[Cadence] = None) -> RawSeries:
    """Parse a per-series CSV with header ``date,value`` (ISO-8601 dates).
    Malformed rows are rejected, never coerced."""
    rows = list(csv.reader(text.splitlines()))
    if not rows or rows[0] != ["date", "value"]:
        raise IngestError("expected header 'date,value'")
    observations = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != 2:
            raise IngestError(f"line {lineno}: expected 2 columns, got {len(row)}")
        try:
            d = date.fromisoformat(row[0].strip())
            v = float(row[1])
        except ValueError as exc:
            raise IngestError(f"line {lineno}: {exc}") from exc
        observations.append((d, v))
    if not observations:
        raise IngestError("empty series")
    if cadence is None:
        cadence = infer_cadence(observations)
    return RawSeries(element, tuple(observations), cadence)


def aggregate_monthly(raw: RawSeries, method: str) -> AlignedSeries:
    """Collapse a raw series to one value per calendar month by summing or
    averaging.  Yearly series are forward-filled to every month of their
    year first.  A month with no observations inside the covered range is
    an error (the pipeline does not invent interior data)."""
    if method not in ("sum", "mean"):
        raise IngestError(f"unknown aggregation method '{method}'")
    if not raw.observations:
        raise IngestError("empty series")

    if raw.cadence == "yearly":
        monthly: dict[int, list[float]] = {}
        for d, v in raw.observations:
            for m in range(12):
                monthly[d.year * 12 + m] = [v]
    else:
        monthly = {}
        for d, v in raw.observations:
            monthly.setdefault(_month_index(d), []).append(v)

    first, last = min(monthly), max(monthly)
    values = []
    for m in range(first, last + 1):
        if m not in monthly:
            y, mo = divmod(m, 12)
            raise IngestError(f"gap in series: no data for {y}-{mo + 1:02d}")
        vals = monthly[m]
        values.append(sum(vals) if method == "sum" else sum(vals) / len(vals))
    return AlignedSeries(raw.element, (first // 12, first % 12 + 1), tuple(values))


def discretize_uniform(values: Sequence[float], L: int) -> list[int]:
    """Bin values into L uniform half-open bins over [min, max] (last bin
    closed): min maps to 0, max to L - 1, mapping is monotone."""
    if L < 2:
        raise IngestError("level count must be >= 2")
    lo, hi = min(values), max(values)
    if lo == hi:
        warnings.warn("constant series: all values map to level 0", stacklevel=2)
        return [0] * len(values)
    span = hi - lo
    return [min(L - 1, math.floor((x - lo) / span * L)) for x in values]


def extend_series(
    series: AlignedSeries,
    horizon: int,
    *,
    periodic: Optional[int] = None,
) -> AlignedSeries:
    """Extend to ``horizon`` months.  With ``periodic=p`` the trailing
    p-month window repeats perpetually; otherwise the last value holds.
    A horizon at or below the current length is a no-op."""
    n = len(series.values)
    if horizon <= n:
        return series
    values = list(series.values)
    if periodic is not None:
        if periodic < 1 or periodic > n:
            raise IngestError(f"period {periodic} exceeds available data ({n} months)")
        while len(values) < horizon:
            values.append(values[-periodic])
    else:
        values.extend([values[-1]] * (horizon - n))
    return replace(series, values=tuple(values))


def series_to_toggles(levels: Sequence[int], L: int) -> list[tuple[int, int]]:
    """Encode a per-month level sequence as a toggle sequence: one toggle
    per change (the value persists until overwritten), starting at step 0.
    Replaying the toggles step-by-step reconstructs the input exactly."""
    toggles = []
    prev: Optional[int] = None
    for t, lvl in enumerate(levels):
        if not 0 <= lvl <= L - 1:
            raise IngestError(f"level {lvl} out of range 0..{L - 1} at step {t}")
        if lvl != prev:
            toggles.append((t, lvl))
            prev = lvl
    return toggles
