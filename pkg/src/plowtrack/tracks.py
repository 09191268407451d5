"""GPS ingest: raw telematics rows grouped into per-vehicle per-day tracks,
plus sampling-interval statistics.

Input format (delimiter-separated, header row): required columns
``VehicleId, Timestamp, Lat, Lon``; extras ignored. Timestamps are ISO-8601
or ``MM/DD/YYYY HH:MM``; naive times are interpreted in the configured
timezone. Days run midnight to midnight in that timezone.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date, datetime
from typing import Iterable
from zoneinfo import ZoneInfo

from .geo import Coordinate
from .inventory import open_table

DEFAULT_TIMEZONE = "America/Indiana/Indianapolis"

GPS_COLUMNS = ("VehicleId", "Timestamp", "Lat", "Lon")


@dataclass(frozen=True)
class GpsPoint:
    vehicle_id: str
    time: datetime  # timezone-aware
    location: Coordinate


@dataclass
class DayTrack:
    vehicle_id: str
    day: date
    points: list[GpsPoint]  # strictly time-ascending, all within the local day


@dataclass(frozen=True)
class RejectedRow:
    row: int  # 1-based file line number (header is line 1)
    reason: str


@dataclass
class IngestResult:
    tracks: dict[tuple[date, str], DayTrack]
    rejects: list[RejectedRow]
    duplicates: int
    total_rows: int


@dataclass(frozen=True)
class SamplingStats:
    total_points: int
    total_tracks: int
    min_interval_s: int
    fraction_exactly_1min: float
    fraction_over_5min: float
    histogram: dict[str, int]


def parse_timestamp(text: str, tz: ZoneInfo) -> datetime:
    s = text.strip()
    if not s:
        raise ValueError("empty timestamp")
    try:
        dt = datetime.fromisoformat(s.replace("Z", "+00:00"))
    except ValueError:
        try:
            dt = datetime.strptime(s, "%m/%d/%Y %H:%M")
        except ValueError:
            raise ValueError(f"unparseable timestamp {text!r}") from None
    if dt.tzinfo is None:
        return dt.replace(tzinfo=tz)
    return dt.astimezone(tz)


def ingest_gps(source, tz: str = DEFAULT_TIMEZONE) -> IngestResult:
    """Group rows into day tracks; bad rows are rejected, not fatal.

    Exact duplicate rows are dropped. When two rows share a vehicle and
    timestamp but disagree on location, the one sorting first by (lat, lon)
    wins so the result does not depend on input row order; the rest are
    rejected as timestamp collisions.
    """
    zone = ZoneInfo(tz)
    reader, _ = open_table(source, GPS_COLUMNS)

    parsed: dict[tuple[str, datetime], tuple[float, float, int]] = {}
    seen_exact: set[tuple[str, datetime, float, float]] = set()
    collisions: list[tuple[str, datetime, float, float, int]] = []
    rejects: list[RejectedRow] = []
    duplicates = 0
    total = 0

    for line_no, row in enumerate(reader, start=2):
        total += 1
        vid = (row.get("VehicleId") or "").strip()
        if not vid:
            rejects.append(RejectedRow(line_no, "missing VehicleId"))
            continue
        try:
            ts = parse_timestamp(row.get("Timestamp") or "", zone)
        except ValueError as exc:
            rejects.append(RejectedRow(line_no, str(exc)))
            continue
        try:
            loc = Coordinate(float(row.get("Lat") or ""), float(row.get("Lon") or ""))
        except ValueError:
            rejects.append(RejectedRow(line_no, "invalid coordinate"))
            continue

        exact_key = (vid, ts, loc.lat, loc.lon)
        if exact_key in seen_exact:
            duplicates += 1
            continue
        seen_exact.add(exact_key)

        key = (vid, ts)
        incumbent = parsed.get(key)
        if incumbent is None:
            parsed[key] = (loc.lat, loc.lon, line_no)
        elif (loc.lat, loc.lon) < incumbent[:2]:
            collisions.append((vid, ts, incumbent[0], incumbent[1], incumbent[2]))
            parsed[key] = (loc.lat, loc.lon, line_no)
        else:
            collisions.append((vid, ts, loc.lat, loc.lon, line_no))

    for _, _, _, _, line_no in sorted(collisions, key=lambda c: c[4]):
        rejects.append(RejectedRow(line_no, "timestamp collision"))
    rejects.sort(key=lambda r: r.row)

    by_day: dict[tuple[date, str], list[GpsPoint]] = {}
    for (vid, ts), (lat, lon, _) in parsed.items():
        point = GpsPoint(vehicle_id=vid, time=ts, location=Coordinate(lat, lon))
        by_day.setdefault((ts.date(), vid), []).append(point)

    tracks = {}
    for key in sorted(by_day, key=lambda k: (k[0].isoformat(), k[1])):
        points = sorted(by_day[key], key=lambda p: p.time)
        tracks[key] = DayTrack(vehicle_id=key[1], day=key[0], points=points)

    return IngestResult(tracks=tracks, rejects=rejects, duplicates=duplicates, total_rows=total)


BUCKET_UNDER_1MIN = "<1min"
BUCKET_EXACT_1MIN = "1min"
BUCKET_1_TO_5MIN = "1-5min"
BUCKET_OVER_5MIN = ">5min"


def sampling_stats(tracks: Iterable[DayTrack]) -> SamplingStats:
    """Interval statistics; gaps are measured within a single day track only.

    Timestamps are rounded to whole seconds first, so "exactly 1 minute"
    means a 60 s gap and "over 5 minutes" means > 300 s.
    """
    histogram = {
        BUCKET_UNDER_1MIN: 0,
        BUCKET_EXACT_1MIN: 0,
        BUCKET_1_TO_5MIN: 0,
        BUCKET_OVER_5MIN: 0,
    }
    total_points = 0
    total_tracks = 0
    min_interval: int | None = None

    for track in tracks:
        total_tracks += 1
        total_points += len(track.points)
        for a, b in zip(track.points, track.points[1:]):
            gap = round(b.time.timestamp()) - round(a.time.timestamp())
            if min_interval is None or gap < min_interval:
                min_interval = gap
            if gap < 60:
                histogram[BUCKET_UNDER_1MIN] += 1
            elif gap == 60:
                histogram[BUCKET_EXACT_1MIN] += 1
            elif gap <= 300:
                histogram[BUCKET_1_TO_5MIN] += 1
            else:
                histogram[BUCKET_OVER_5MIN] += 1

    intervals = total_points - total_tracks
    return SamplingStats(
        total_points=total_points,
        total_tracks=total_tracks,
        min_interval_s=min_interval if min_interval is not None else 0,
        fraction_exactly_1min=histogram[BUCKET_EXACT_1MIN] / intervals if intervals else 0.0,
        fraction_over_5min=histogram[BUCKET_OVER_5MIN] / intervals if intervals else 0.0,
        histogram=histogram,
    )
