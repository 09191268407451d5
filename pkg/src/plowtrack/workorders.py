"""Work-order verification and creation.

Reported activity rows are checked against hours computed from the matched
GPS tracks. Work-order input columns: ``WOId, VehicleId, Date, RouteRef,
StartPost, EndPost, StartOffset, EndOffset, ReportedHrs``; vehicle-activity
input columns: ``VehicleId, Date, RouteRef, StartPost, EndPost``. Dates are
``YYYY-MM-DD`` or ``MM/DD/YYYY``.

Work orders carry a single date. Rows sharing a WOId may span several days;
those records are verified by summing the computed hours over every date in
the group and are flagged, since day attribution inside such orders is
unreliable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import date, datetime
from typing import Iterable, Mapping, Sequence

from .inventory import TiledIndex, open_table
from .matching import MatchedPoint
from .segtime import (
    DEFAULT_CAP_SECONDS,
    SegmentSpec,
    SegmentTimeFailure,
    compute_seconds,
)
from .tracks import RejectedRow

DEFAULT_ABS_TOL_HOURS = 0.25
DEFAULT_REL_TOL = 0.10

WO_COLUMNS = ("WOId", "VehicleId", "Date", "RouteRef", "StartPost", "EndPost", "StartOffset", "EndOffset", "ReportedHrs")
ACTIVITY_COLUMNS = ("VehicleId", "Date", "RouteRef", "StartPost", "EndPost")

STATUS_MATCH = "MATCH"
STATUS_MISMATCH = "MISMATCH"
STATUS_NO_DATA = "NO_DATA"
STATUS_OK = "OK"
STATUS_ZERO = "ZERO"

MULTI_DAY_WARNING = "multi-day"


@dataclass(frozen=True)
class WorkOrder:
    wo_id: str
    vehicle_id: str
    date: date
    route_ref: str  # may be blank; such orders verify as NO_DATA
    start_post: int | None
    end_post: int | None
    start_offset: float | None
    end_offset: float | None
    reported_hours: float

    def segment_spec(self) -> SegmentSpec:
        return SegmentSpec(
            segment_id=f"wo:{self.wo_id}",
            route_ref=self.route_ref,
            start_post=self.start_post,
            end_post=self.end_post,
            start_offset=self.start_offset,
            end_offset=self.end_offset,
        )


@dataclass(frozen=True)
class VehicleActivity:
    vehicle_id: str
    date: date
    route_ref: str
    start_post: int | None = None
    end_post: int | None = None
    start_offset: float | None = None
    end_offset: float | None = None

    def segment_spec(self) -> SegmentSpec:
        return SegmentSpec(
            segment_id=f"activity:{self.vehicle_id}:{self.date.isoformat()}",
            route_ref=self.route_ref,
            start_post=self.start_post,
            end_post=self.end_post,
            start_offset=self.start_offset,
            end_offset=self.end_offset,
        )


@dataclass(frozen=True)
class VerificationRecord:
    order: WorkOrder
    computed_hours: float
    match_ratio: float | None  # absent when reported hours are zero
    status: str
    failure_reason: SegmentTimeFailure
    days_spread: int

    @property
    def multi_day(self) -> bool:
        return self.days_spread > 1


@dataclass(frozen=True)
class CreationRecord:
    activity: VehicleActivity
    total_hours: float
    start_time: datetime | None
    end_time: datetime | None
    status: str
    failure_reason: SegmentTimeFailure


def parse_date(text: str) -> date:
    s = text.strip()
    try:
        return date.fromisoformat(s)
    except ValueError:
        pass
    try:
        return datetime.strptime(s, "%m/%d/%Y").date()
    except ValueError:
        raise ValueError(f"unparseable date {text!r}") from None


def _optional_int(cell, what):
    if cell is None or not str(cell).strip():
        return None
    try:
        return int(str(cell).strip())
    except ValueError:
        raise ValueError(f"bad {what} {cell!r}") from None


def _optional_float(cell, what):
    if cell is None or not str(cell).strip():
        return None
    try:
        return float(str(cell).strip())
    except ValueError:
        raise ValueError(f"bad {what} {cell!r}") from None


def _check_posts(start_post, end_post, start_offset, end_offset):
    if start_post is not None and end_post is not None and start_post > end_post:
        raise ValueError(f"start post {start_post} > end post {end_post}")
    if start_offset is not None and start_post is None:
        raise ValueError("start offset without start post")
    if end_offset is not None and end_post is None:
        raise ValueError("end offset without end post")
    for off in (start_offset, end_offset):
        if off is not None and not abs(off) < 1.0:
            raise ValueError(f"offset {off} must satisfy |offset| < 1 mile")


def parse_work_orders(source) -> tuple[list[WorkOrder], list[RejectedRow]]:
    """Parse work orders; multiple rows per vehicle and day are allowed."""
    reader, _ = open_table(source, WO_COLUMNS)
    orders: list[WorkOrder] = []
    rejects: list[RejectedRow] = []
    for line_no, row in enumerate(reader, start=2):
        try:
            wo_id = (row.get("WOId") or "").strip()
            vehicle_id = (row.get("VehicleId") or "").strip()
            if not wo_id or not vehicle_id:
                raise ValueError("missing WOId or VehicleId")
            reported = float((row.get("ReportedHrs") or "").strip())
            if not math.isfinite(reported) or reported < 0:
                raise ValueError(f"bad ReportedHrs {row.get('ReportedHrs')!r}")
            start_post = _optional_int(row.get("StartPost"), "StartPost")
            end_post = _optional_int(row.get("EndPost"), "EndPost")
            start_offset = _optional_float(row.get("StartOffset"), "StartOffset")
            end_offset = _optional_float(row.get("EndOffset"), "EndOffset")
            _check_posts(start_post, end_post, start_offset, end_offset)
            orders.append(
                WorkOrder(
                    wo_id=wo_id,
                    vehicle_id=vehicle_id,
                    date=parse_date(row.get("Date") or ""),
                    route_ref=(row.get("RouteRef") or "").strip(),
                    start_post=start_post,
                    end_post=end_post,
                    start_offset=start_offset,
                    end_offset=end_offset,
                    reported_hours=reported,
                )
            )
        except ValueError as exc:
            rejects.append(RejectedRow(line_no, str(exc)))
    return orders, rejects


def parse_activities(source) -> tuple[list[VehicleActivity], list[RejectedRow]]:
    reader, _ = open_table(source, ACTIVITY_COLUMNS)
    activities: list[VehicleActivity] = []
    rejects: list[RejectedRow] = []
    for line_no, row in enumerate(reader, start=2):
        try:
            vehicle_id = (row.get("VehicleId") or "").strip()
            if not vehicle_id:
                raise ValueError("missing VehicleId")
            start_post = _optional_int(row.get("StartPost"), "StartPost")
            end_post = _optional_int(row.get("EndPost"), "EndPost")
            _check_posts(start_post, end_post, None, None)
            activities.append(
                VehicleActivity(
                    vehicle_id=vehicle_id,
                    date=parse_date(row.get("Date") or ""),
                    route_ref=(row.get("RouteRef") or "").strip(),
                    start_post=start_post,
                    end_post=end_post,
                )
            )
        except ValueError as exc:
            rejects.append(RejectedRow(line_no, str(exc)))
    return activities, rejects


def match_status(computed: float, reported: float, abs_tol: float, rel_tol: float) -> str:
    """Pure tolerance rule: MATCH when |computed - reported| is small enough."""
    return STATUS_MATCH if abs(computed - reported) <= max(abs_tol, rel_tol * reported) else STATUS_MISMATCH


def verify(
    orders: Sequence[WorkOrder],
    matched: Mapping[tuple[date, str], Sequence[MatchedPoint]],
    index: TiledIndex,
    abs_tol: float = DEFAULT_ABS_TOL_HOURS,
    rel_tol: float = DEFAULT_REL_TOL,
    cap_seconds: float = DEFAULT_CAP_SECONDS,
) -> list[VerificationRecord]:
    """One record per order, in input order."""
    dates_by_wo: dict[str, set[date]] = {}
    for order in orders:
        dates_by_wo.setdefault(order.wo_id, set()).add(order.date)

    segment_routes = index.segment_routes()
    records: list[VerificationRecord] = []
    for order in orders:
        group_dates = sorted(dates_by_wo[order.wo_id])
        spread = (group_dates[-1] - group_dates[0]).days + 1
        total_seconds = 0.0
        failure = SegmentTimeFailure.NONE
        any_ok = False
        for d in group_dates:
            result = compute_seconds(
                order.segment_spec(), order.vehicle_id, d, matched,
                index.mile_markers, segment_routes, cap_seconds,
            )
            if result.failure_reason is SegmentTimeFailure.NONE:
                any_ok = True
                total_seconds += result.computed_seconds
            elif failure is SegmentTimeFailure.NONE:
                failure = result.failure_reason
        if not any_ok:
            computed_hours = 0.0
            status = STATUS_NO_DATA
        else:
            failure = SegmentTimeFailure.NONE
            computed_hours = total_seconds / 3600.0
            status = match_status(computed_hours, order.reported_hours, abs_tol, rel_tol)
        ratio = computed_hours / order.reported_hours if order.reported_hours != 0 else None
        records.append(
            VerificationRecord(
                order=order,
                computed_hours=computed_hours,
                match_ratio=ratio,
                status=status,
                failure_reason=failure,
                days_spread=spread,
            )
        )
    return records


def create_orders(
    activities: Sequence[VehicleActivity],
    matched: Mapping[tuple[date, str], Sequence[MatchedPoint]],
    index: TiledIndex,
    cap_seconds: float = DEFAULT_CAP_SECONDS,
) -> list[CreationRecord]:
    """One row per activity; zero-hour rows are kept and flagged so data gaps
    stay visible. Start/end times are the first/last qualifying GPS samples."""
    segment_routes = index.segment_routes()
    records: list[CreationRecord] = []
    for activity in activities:
        result = compute_seconds(
            activity.segment_spec(), activity.vehicle_id, activity.date, matched,
            index.mile_markers, segment_routes, cap_seconds,
        )
        if result.failure_reason is not SegmentTimeFailure.NONE:
            status = STATUS_NO_DATA
        elif result.computed_seconds == 0.0:
            status = STATUS_ZERO
        else:
            status = STATUS_OK
        records.append(
            CreationRecord(
                activity=activity,
                total_hours=result.computed_hours,
                start_time=result.first_time,
                end_time=result.last_time,
                status=status,
                failure_reason=result.failure_reason,
            )
        )
    return records


def spread_histogram(orders: Iterable[WorkOrder]) -> dict[int, int]:
    """Distribution of work orders over the day span their rows cover."""
    dates_by_wo: dict[str, list[date]] = {}
    for order in orders:
        dates_by_wo.setdefault(order.wo_id, []).append(order.date)
    histogram: dict[int, int] = {}
    for dates in dates_by_wo.values():
        spread = (max(dates) - min(dates)).days + 1
        histogram[spread] = histogram.get(spread, 0) + 1
    return dict(sorted(histogram.items()))


# --- report formatting --------------------------------------------------------

VERIFY_HEADER = list(WO_COLUMNS) + ["ComputedHrs", "MatchRatio", "Status", "Warnings"]
CREATE_HEADER = list(ACTIVITY_COLUMNS) + ["TotalHrs", "StartTime", "EndTime", "Status"]


def _fmt_opt(value) -> str:
    return "" if value is None else str(value)


def verification_report_rows(records: Sequence[VerificationRecord]) -> list[list[str]]:
    rows = []
    for rec in records:
        o = rec.order
        rows.append(
            [
                o.wo_id,
                o.vehicle_id,
                o.date.isoformat(),
                o.route_ref,
                _fmt_opt(o.start_post),
                _fmt_opt(o.end_post),
                _fmt_opt(o.start_offset),
                _fmt_opt(o.end_offset),
                f"{o.reported_hours:.2f}",
                f"{rec.computed_hours:.2f}",
                f"{rec.match_ratio:.4f}" if rec.match_ratio is not None else "",
                rec.status,
                MULTI_DAY_WARNING if rec.multi_day else "",
            ]
        )
    return rows


def verification_report_json(records: Sequence[VerificationRecord]) -> list[dict]:
    return [
        {
            "wo_id": rec.order.wo_id,
            "vehicle_id": rec.order.vehicle_id,
            "date": rec.order.date.isoformat(),
            "route_ref": rec.order.route_ref,
            "start_post": rec.order.start_post,
            "end_post": rec.order.end_post,
            "start_offset": rec.order.start_offset,
            "end_offset": rec.order.end_offset,
            "reported_hours": rec.order.reported_hours,
            "computed_hours": rec.computed_hours,
            "match_ratio": rec.match_ratio,
            "status": rec.status,
            "failure_reason": rec.failure_reason.value,
            "days_spread": rec.days_spread,
            "warnings": [MULTI_DAY_WARNING] if rec.multi_day else [],
        }
        for rec in records
    ]


def creation_report_rows(records: Sequence[CreationRecord]) -> list[list[str]]:
    rows = []
    for rec in records:
        a = rec.activity
        rows.append(
            [
                a.vehicle_id,
                a.date.isoformat(),
                a.route_ref,
                _fmt_opt(a.start_post),
                _fmt_opt(a.end_post),
                f"{rec.total_hours:.2f}",
                rec.start_time.isoformat() if rec.start_time else "",
                rec.end_time.isoformat() if rec.end_time else "",
                rec.status,
            ]
        )
    return rows


def creation_report_json(records: Sequence[CreationRecord]) -> list[dict]:
    return [
        {
            "vehicle_id": rec.activity.vehicle_id,
            "date": rec.activity.date.isoformat(),
            "route_ref": rec.activity.route_ref,
            "start_post": rec.activity.start_post,
            "end_post": rec.activity.end_post,
            "total_hours": rec.total_hours,
            "start_time": rec.start_time.isoformat() if rec.start_time else None,
            "end_time": rec.end_time.isoformat() if rec.end_time else None,
            "status": rec.status,
            "failure_reason": rec.failure_reason.value,
        }
        for rec in records
    ]
