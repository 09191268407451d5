"""Per-segment operating time for one vehicle on one day.

The day's matched points are filtered to those on the segment's route (and
inside the effective milepost bounds when the segment has posts); each
qualifying point contributes the gap to its successor in the full track,
capped so long sampling gaps do not inflate the total.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date, datetime
from enum import Enum
from typing import Mapping, Sequence

from .errors import RouteParseError
from .inventory import MileMarker, RoadSegment, road_name_to_type
from .matching import MatchedPoint

DEFAULT_CAP_SECONDS = 600.0


class SegmentTimeFailure(Enum):
    NONE = "None"
    NO_ROUTE_REF = "NoRouteRef"
    NO_MILE_MARKERS = "NoMileMarkers"
    POST_NOT_FOUND = "PostNotFound"
    NO_TRACK = "NoTrack"


@dataclass(frozen=True)
class SegmentSpec:
    """The fields of a segment that the time computation needs."""

    segment_id: str
    route_ref: str
    start_post: int | None = None
    end_post: int | None = None
    start_offset: float | None = None
    end_offset: float | None = None

    @classmethod
    def from_road_segment(cls, seg: RoadSegment) -> "SegmentSpec":
        return cls(
            segment_id=seg.segment_id,
            route_ref=seg.route.raw,
            start_post=seg.start_post,
            end_post=seg.end_post,
            start_offset=seg.start_offset,
            end_offset=seg.end_offset,
        )


@dataclass(frozen=True)
class EffectiveBounds:
    lower: float
    upper: float

    def contains(self, milepost: float) -> bool:
        return self.lower <= milepost <= self.upper


@dataclass(frozen=True)
class SegmentTimeResult:
    segment_id: str
    vehicle_id: str
    day: date
    computed_seconds: float
    computed_hours: float
    points_used: int
    failure_reason: SegmentTimeFailure
    first_time: datetime | None = None  # first / last qualifying sample times
    last_time: datetime | None = None


def effective_bounds(
    seg: SegmentSpec, markers: Sequence[MileMarker]
) -> tuple[EffectiveBounds | None, SegmentTimeFailure]:
    """Numeric milepost bounds (post + offset), checking marker existence.

    Both base posts must exist in the route's marker list; a negative start
    offset additionally requires the preceding marker and a positive end
    offset the subsequent one.
    """
    if not markers:
        return None, SegmentTimeFailure.NO_MILE_MARKERS
    posts = {m.post for m in markers}
    start_offset = seg.start_offset or 0.0
    end_offset = seg.end_offset or 0.0
    required = {seg.start_post, seg.end_post}
    if start_offset < 0:
        required.add(seg.start_post - 1)
    if end_offset > 0:
        required.add(seg.end_post + 1)
    if not required <= posts:
        return None, SegmentTimeFailure.POST_NOT_FOUND
    return EffectiveBounds(seg.start_post + start_offset, seg.end_post + end_offset), SegmentTimeFailure.NONE


def compute_seconds(
    seg: SegmentSpec,
    vehicle_id: str,
    day: date,
    matched: Mapping[tuple[date, str], Sequence[MatchedPoint]],
    markers: Mapping[str, Sequence[MileMarker]],
    segment_routes: Mapping[str, str],
    cap_seconds: float = DEFAULT_CAP_SECONDS,
) -> SegmentTimeResult:
    """Seconds the vehicle operated on the segment during the given day.

    ``matched`` maps (day, vehicle_id) to that day's matched points in time
    order; ``segment_routes`` maps matched segment ids to canonical route
    names. Points that are off-road, on a different route, or outside the
    effective bounds are skipped; a point with an undetermined milepost is
    skipped whenever bounds apply, because membership cannot be asserted.
    """

    def failed(reason: SegmentTimeFailure) -> SegmentTimeResult:
        return SegmentTimeResult(
            segment_id=seg.segment_id,
            vehicle_id=vehicle_id,
            day=day,
            computed_seconds=0.0,
            computed_hours=0.0,
            points_used=0,
            failure_reason=reason,
        )

    if not seg.route_ref.strip():
        return failed(SegmentTimeFailure.NO_ROUTE_REF)
    try:
        route = road_name_to_type(seg.route_ref)
    except RouteParseError:
        return failed(SegmentTimeFailure.NO_ROUTE_REF)

    bounds: EffectiveBounds | None = None
    if seg.start_post is not None and seg.end_post is not None:
        route_markers = markers.get(route.canonical_name, ())
        bounds, failure = effective_bounds(seg, route_markers)
        if failure is not SegmentTimeFailure.NONE:
            return failed(failure)

    track = matched.get((day, vehicle_id))
    if not track:
        return failed(SegmentTimeFailure.NO_TRACK)

    seconds = 0.0
    used = 0
    first_time: datetime | None = None
    last_time: datetime | None = None
    last_index = len(track) - 1
    for i, mp in enumerate(track):
        if mp.road is None:
            continue
        if segment_routes.get(mp.road) != route.canonical_name:
            continue
        if bounds is not None:
            if mp.milepost is None or not bounds.contains(mp.milepost):
                continue
        if first_time is None:
            first_time = mp.point.time
        last_time = mp.point.time
        if i < last_index:
            gap = (track[i + 1].point.time - mp.point.time).total_seconds()
            seconds += min(gap, cap_seconds)
            used += 1

    return SegmentTimeResult(
        segment_id=seg.segment_id,
        vehicle_id=vehicle_id,
        day=day,
        computed_seconds=seconds,
        computed_hours=seconds / 3600.0,
        points_used=used,
        failure_reason=SegmentTimeFailure.NONE,
        first_time=first_time,
        last_time=last_time,
    )
