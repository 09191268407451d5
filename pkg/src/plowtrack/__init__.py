"""Fleet GPS map matching against a linearly referenced road inventory,
per-segment operating hours, and work-order verification."""

from .geo import Coordinate, Polyline, geohash_encode, geohash_neighbors, great_circle_distance, point_to_polyline
from .inventory import (
    MileMarker,
    RoadClass,
    RoadSegment,
    RouteRef,
    TiledIndex,
    build_index,
    road_name_to_type,
    synthesize_mile_segments,
    tiles_for_query,
)
from .matching import MatchState, MatchThresholds, MatchedPoint, match_point, match_track, milepost_of
from .segtime import EffectiveBounds, SegmentSpec, SegmentTimeFailure, SegmentTimeResult, compute_seconds, effective_bounds
from .tracks import DayTrack, GpsPoint, SamplingStats, ingest_gps, sampling_stats
from .workorders import VehicleActivity, VerificationRecord, WorkOrder, create_orders, parse_work_orders, spread_histogram, verify

__version__ = "0.1.0"
