"""Shared synthetic fixtures: small road networks, tracks, and tables."""

from __future__ import annotations

import random
from datetime import date, datetime, timedelta
from zoneinfo import ZoneInfo

import pytest

from plowtrack.geo import Coordinate, Polyline
from plowtrack.inventory import MileMarker, RoadClass, RoadSegment, build_index, road_name_to_type
from plowtrack.tracks import DayTrack, GpsPoint

TZ = ZoneInfo("America/Indiana/Indianapolis")
DAY = date(2021, 1, 15)


def ts(hour=8, minute=0, second=0, day=DAY):
    return datetime(day.year, day.month, day.day, hour, minute, second, tzinfo=TZ)


def straight_segment(segment_id, route_raw, lat, lon0, lon1, n_vertices=2, start_post=None, end_post=None):
    """East-west segment at constant latitude."""
    lons = [lon0 + (lon1 - lon0) * i / (n_vertices - 1) for i in range(n_vertices)]
    return RoadSegment(
        segment_id=segment_id,
        route=road_name_to_type(route_raw),
        geometry=Polyline([Coordinate(lat, lon) for lon in lons]),
        start_post=start_post,
        end_post=end_post,
    )


def markers_along(route_raw, posts, lat, lon_of_post, offset_lat=0.0):
    """Markers beside an east-west route, one per integer post."""
    route = road_name_to_type(route_raw)
    return [
        MileMarker(route=route, post=p, location=Coordinate(lat + offset_lat, lon_of_post(p)))
        for p in posts
    ]


MILE_DEG_LON = 1.0 / (111_320.0 * 0.766044443118978 / 1609.344)  # ~1 mile of longitude at lat 40


def route_with_markers(route_raw="I-65", lat=40.0, first_post=10, n_markers=11, segment_id="seg-i65"):
    """One straight route whose markers sit exactly one mile apart.

    Returns (segments, markers); the segment spans the full marker range.
    """
    lon_of = lambda p: -86.5 + (p - first_post) * MILE_DEG_LON
    seg = RoadSegment(
        segment_id=segment_id,
        route=road_name_to_type(route_raw),
        geometry=Polyline(
            [Coordinate(lat, lon_of(first_post)), Coordinate(lat, lon_of(first_post + n_markers - 1))]
        ),
        start_post=first_post,
        end_post=first_post + n_markers - 1,
    )
    markers = markers_along(route_raw, range(first_post, first_post + n_markers), lat, lon_of)
    return [seg], markers


def day_track(points_spec, vehicle_id="V1", day=DAY):
    """Build a DayTrack from (seconds_since_8am, lat, lon) triples."""
    points = [
        GpsPoint(vehicle_id=vehicle_id, time=ts() + timedelta(seconds=s), location=Coordinate(lat, lon))
        for s, lat, lon in points_spec
    ]
    return DayTrack(vehicle_id=vehicle_id, day=day, points=points)


CLASS_PREFIX = {
    RoadClass.INTERSTATE: "I-",
    RoadClass.STATE_ROAD: "SR-",
    RoadClass.LOCAL_ROAD: "Road ",
}


def random_network(rng: random.Random, n_segments, center=(40.0, -86.5), spread=0.6):
    """Random short segments of mixed classes scattered around a center."""
    segments = []
    classes = [RoadClass.INTERSTATE, RoadClass.STATE_ROAD, RoadClass.LOCAL_ROAD]
    for i in range(n_segments):
        road_class = classes[i % 3]
        route_raw = f"{CLASS_PREFIX[road_class]}{i}"
        lat = center[0] + rng.uniform(-spread, spread)
        lon = center[1] + rng.uniform(-spread, spread)
        n_vertices = rng.randint(2, 4)
        vertices = [Coordinate(lat, lon)]
        for _ in range(n_vertices - 1):
            lat += rng.uniform(-0.02, 0.02)
            lon += rng.uniform(-0.02, 0.02)
            vertices.append(Coordinate(lat, lon))
        segments.append(
            RoadSegment(
                segment_id=f"seg-{i:04d}",
                route=road_name_to_type(route_raw),
                geometry=Polyline(vertices),
            )
        )
    return segments


@pytest.fixture
def small_index():
    segments, markers = route_with_markers()
    return build_index(segments, markers)
