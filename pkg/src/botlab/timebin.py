"""UTC calendar binning shared by features, sentiment and topics.

Periods are identified by strings: "2014" (year), "2014-09" (month),
"2014-09-03" (day) and the literal "overall". All arithmetic happens on
timezone-aware UTC datetimes so bin edges are timezone-stable.
"""
from __future__ import annotations

import datetime as dt

from .errors import UnparseableTimestamp

LEVELS = ("overall", "year", "month", "day")
UTC = dt.timezone.utc


def parse_timestamp(raw: str, line: int = 0) -> dt.datetime:
    """Parse ISO-8601 (with or without Z/offset) or epoch seconds to UTC."""
    s = raw.strip()
    if not s:
        raise UnparseableTimestamp(line, "empty timestamp")
    try:
        return dt.datetime.fromtimestamp(float(s), tz=UTC)
    except (ValueError, OverflowError, OSError):
        pass
    iso = s[:-1] + "+00:00" if s.endswith(("Z", "z")) else s
    try:
        parsed = dt.datetime.fromisoformat(iso)
    except ValueError:
        raise UnparseableTimestamp(line, f"cannot parse timestamp {raw!r}") from None
    if parsed.tzinfo is None:
        parsed = parsed.replace(tzinfo=UTC)
    return parsed.astimezone(UTC)


def period_of(ts: dt.datetime, level: str) -> str:
    if level == "overall":
        return "overall"
    if level == "year":
        return f"{ts.year:04d}"
    if level == "month":
        return f"{ts.year:04d}-{ts.month:02d}"
    if level == "day":
        return f"{ts.year:04d}-{ts.month:02d}-{ts.day:02d}"
    raise ValueError(f"unknown level {level!r}")


def _next_period(label: str, level: str) -> str:
    start = period_start(label)
    if level == "year":
        return f"{start.year + 1:04d}"
    if level == "month":
        y, m = start.year, start.month + 1
        if m == 13:
            y, m = y + 1, 1
        return f"{y:04d}-{m:02d}"
    nxt = start + dt.timedelta(days=1)
    return period_of(nxt, "day")


def period_start(label: str) -> dt.datetime:
    """UTC start instant of a period label (also parses bare "2014" etc.)."""
    parts = label.split("-")
    try:
        if len(parts) == 1:
            return dt.datetime(int(parts[0]), 1, 1, tzinfo=UTC)
        if len(parts) == 2:
            return dt.datetime(int(parts[0]), int(parts[1]), 1, tzinfo=UTC)
        if len(parts) == 3:
            return dt.datetime(int(parts[0]), int(parts[1]), int(parts[2]), tzinfo=UTC)
    except ValueError:
        pass
    raise ValueError(f"bad period label {label!r}")


def period_end(label: str) -> dt.datetime:
    """Exclusive UTC end instant of a period label."""
    level = level_of(label)
    return period_start(_next_period(label, level))


def level_of(label: str) -> str:
    n = label.count("-")
    if n == 0:
        return "year"
    if n == 1:
        return "month"
    if n == 2:
        return "day"
    raise ValueError(f"bad period label {label!r}")


def period_range(start: dt.datetime, end: dt.datetime, level: str) -> list[str]:
    """Contiguous sorted period labels covering [start, end] inclusive."""
    if level == "overall":
        return ["overall"]
    labels = [period_of(start, level)]
    last = period_of(end, level)
    while labels[-1] != last:
        labels.append(_next_period(labels[-1], level))
    return labels


def window_bounds(window) -> tuple[dt.datetime, dt.datetime]:
    """Resolve a window to half-open UTC instants [start, end).

    Accepts a period label ("2014", "2014-10"), a (start, end) pair of
    labels or ISO timestamps, or None is rejected by the caller.
    """
    if isinstance(window, str):
        return period_start(window), period_end(window)
    start_raw, end_raw = window
    start = _instant(start_raw, is_end=False)
    end = _instant(end_raw, is_end=True)
    return start, end


def _instant(raw, is_end: bool) -> dt.datetime:
    if isinstance(raw, dt.datetime):
        return raw.astimezone(UTC)
    try:
        return period_end(raw) if is_end else period_start(raw)
    except ValueError:
        return parse_timestamp(raw)
