"""UTC timestamps at second resolution.

The domain operations are clock-free: timestamps always arrive from
callers. These helpers pin the single wire/display format used everywhere:
``YYYY-MM-DDTHH:MM:SSZ``.
"""

from __future__ import annotations

from datetime import datetime, timezone

_FMT = "%Y-%m-%dT%H:%M:%SZ"


def utc_now() -> datetime:
    """Current UTC time truncated to whole seconds."""
    return datetime.now(timezone.utc).replace(microsecond=0)


def ensure_utc_second(ts: datetime) -> datetime:
    """Validate that ``ts`` is tz-aware UTC at second resolution."""
    if ts.tzinfo is None or ts.utcoffset() != timezone.utc.utcoffset(None):
        raise ValueError(f"timestamp must be tz-aware UTC: {ts!r}")
    if ts.microsecond != 0:
        raise ValueError(f"timestamp must have second resolution: {ts!r}")
    return ts


def format_utc(ts: datetime) -> str:
    return ensure_utc_second(ts).strftime(_FMT)


def parse_utc(text: str) -> datetime:
    return datetime.strptime(text, _FMT).replace(tzinfo=timezone.utc)
