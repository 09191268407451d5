"""Nearest-road identification.

Candidates come from the point's geohash tile and its neighbors. Selection
gives first priority to the previous point's road (the hint) when it is still
within ``hint_m``, then to the closest interstate, state road and local road
in that order, each against its own snap threshold; otherwise the point is
off-road. Matched points carry a fractional milepost interpolated between the
route's mile markers by arc length.
"""

from __future__ import annotations

import math
import weakref
from dataclasses import dataclass
from datetime import date, datetime
from typing import Sequence

import numpy as np

from . import _kernels
from .geo import Coordinate, Polyline, geohash_encode, point_to_polyline
from .geo import _neighbors_cached
from .inventory import RoadClass, TiledIndex
from .tracks import DayTrack, GpsPoint

_CLASS_ORDER = (RoadClass.INTERSTATE, RoadClass.STATE_ROAD, RoadClass.LOCAL_ROAD)
_CLASS_CODE = {cls: i for i, cls in enumerate(_CLASS_ORDER)}


@dataclass(frozen=True)
class MatchThresholds:
    """Snap thresholds in meters, one per road class plus the hint radius."""

    interstate_m: float = 200.0
    state_m: float = 100.0
    local_m: float = 50.0
    hint_m: float = 250.0

    def __post_init__(self) -> None:
        for name in ("interstate_m", "state_m", "local_m", "hint_m"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.hint_m < max(self.interstate_m, self.state_m, self.local_m):
            raise ValueError("hint_m must be >= every class threshold")

    @property
    def max_snap_m(self) -> float:
        return max(self.interstate_m, self.state_m, self.local_m, self.hint_m)


@dataclass(frozen=True)
class MatchState:
    previous_road: str | None = None


@dataclass(frozen=True)
class MatchedPoint:
    point: GpsPoint
    road: str | None  # None means off-road
    road_class: RoadClass | None
    milepost: float | None
    snap_distance_m: float | None


class _CandidateBlock:
    """Per-query-cell edge arrays for all segments reachable from that cell.

    Segments are ordered by id so scan tie-breaks resolve to the smallest
    segment id. Edge arrays are concatenations of the polylines' cached
    radian arrays, so distances here are bit-compatible with
    point_to_polyline on the individual geometries.
    """

    __slots__ = ("seg_ids", "seg_class", "edge_starts", "lat1", "lon1", "lat2", "lon2", "arc0", "arc_scale")

    def __init__(self, idx: TiledIndex, seg_ids: list[str]):
        self.seg_ids = seg_ids
        self.seg_class = np.array(
            [_CLASS_CODE[idx.segments[s].route.road_class] for s in seg_ids], dtype=np.int64
        )
        lat1, lon1, lat2, lon2 = [], [], [], []
        arc0, arc_scale = [], []
        starts = []
        pos = 0
        for sid in seg_ids:
            line = idx.segments[sid].geometry
            starts.append(pos)
            pos += len(line.lats_rad) - 1
            lat1.append(line.lats_rad[:-1])
            lon1.append(line.lons_rad[:-1])
            lat2.append(line.lats_rad[1:])
            lon2.append(line.lons_rad[1:])
            arc0.append(line.cum_len_m[:-1] / line.length_m)
            arc_scale.append(line.edge_len_m / line.length_m)
        self.lat1 = np.concatenate(lat1)
        self.lon1 = np.concatenate(lon1)
        self.lat2 = np.concatenate(lat2)
        self.lon2 = np.concatenate(lon2)
        self.arc0 = np.concatenate(arc0)
        self.arc_scale = np.concatenate(arc_scale)
        self.edge_starts = np.array(starts, dtype=np.int64)


_block_caches: "weakref.WeakKeyDictionary[TiledIndex, dict]" = weakref.WeakKeyDictionary()
_marker_caches: "weakref.WeakKeyDictionary[TiledIndex, dict]" = weakref.WeakKeyDictionary()


def _block_for(idx: TiledIndex, cell: str) -> _CandidateBlock | None:
    cache = _block_caches.setdefault(idx, {})
    if cell in cache:
        return cache[cell]
    ids: set[str] = set()
    for c in _neighbors_cached(cell):
        tile = idx.tiles.get(c)
        if tile is not None:
            ids.update(tile.segment_ids)
    block = _CandidateBlock(idx, sorted(ids)) if ids else None
    cache[cell] = block
    return block


def cached_block_count(idx: TiledIndex) -> int:
    """Number of query cells whose candidate arrays have been materialized."""
    return len(_block_caches.get(idx, {}))


def cached_block_cells(idx: TiledIndex) -> set[str]:
    return set(_block_caches.get(idx, {}))


def _project_arc(line: Polyline, plat: float, plon: float) -> tuple[float, float]:
    """Distance and arc fraction of the closest point, without building objects."""
    i, d, t = _kernels.project_polyline(plat, plon, line.lats_rad, line.lons_rad)
    i = int(i)
    arc = (float(line.cum_len_m[i]) + float(t) * float(line.edge_len_m[i])) / line.length_m
    return float(d), min(max(arc, 0.0), 1.0)


def match_point(
    idx: TiledIndex, state: MatchState, point: GpsPoint, thresholds: MatchThresholds
) -> tuple[MatchedPoint, MatchState]:
    """Match one GPS point; returns the match and the next hint state."""
    p = point.location
    plat = math.radians(p.lat)
    plon = math.radians(p.lon)

    # Hint first: the previous road keeps the vehicle matched across brief
    # passes over crossing roads.
    if state.previous_road is not None:
        seg = idx.segments.get(state.previous_road)
        if seg is not None:
            dist, arc = _project_arc(seg.geometry, plat, plon)
            if dist <= thresholds.hint_m:
                matched = MatchedPoint(
                    point=point,
                    road=state.previous_road,
                    road_class=seg.route.road_class,
                    milepost=milepost_of(idx, state.previous_road, arc),
                    snap_distance_m=dist,
                )
                return matched, state

    cell = geohash_encode(p, idx.precision)
    block = _block_for(idx, cell)
    if block is not None:
        si, dist, ei, t = _kernels.select_block(
            plat, plon, block.lat1, block.lon1, block.lat2, block.lon2,
            block.edge_starts, block.seg_class,
            thresholds.interstate_m, thresholds.state_m, thresholds.local_m,
        )
        si = int(si)
        if si >= 0:
            ei = int(ei)
            sid = block.seg_ids[si]
            arc = float(block.arc0[ei]) + float(t) * float(block.arc_scale[ei])
            matched = MatchedPoint(
                point=point,
                road=sid,
                road_class=_CLASS_ORDER[int(block.seg_class[si])],
                milepost=milepost_of(idx, sid, min(max(arc, 0.0), 1.0)),
                snap_distance_m=float(dist),
            )
            return matched, MatchState(previous_road=sid)

    off = MatchedPoint(point=point, road=None, road_class=None, milepost=None, snap_distance_m=None)
    return off, MatchState(previous_road=None)


def match_track(idx: TiledIndex, track: DayTrack, thresholds: MatchThresholds) -> list[MatchedPoint]:
    """Match a day track in time order; the hint never crosses track starts."""
    state = MatchState()
    out: list[MatchedPoint] = []
    for point in track.points:
        matched, state = match_point(idx, state, point, thresholds)
        out.append(matched)
    return out


def milepost_of(idx: TiledIndex, segment_id: str, foot_arc_fraction: float) -> float | None:
    """Fractional milepost of a snap foot, interpolated between mile markers.

    The route's markers are projected once onto the segment's geometry; the
    foot's arc position is interpolated between the bracketing markers and
    clamped to the first/last marker posts beyond the ends. None when the
    route has fewer than two markers or their projections cannot be ordered
    along the geometry.
    """
    info = _marker_projection(idx, segment_id)
    if info is None:
        return None
    posts, arcs, flipped = info
    f = -foot_arc_fraction if flipped else foot_arc_fraction
    j = int(np.searchsorted(arcs, f, side="left"))
    if j < len(arcs) and arcs[j] == f:
        return float(posts[j])
    if j == 0:
        return float(posts[0])
    if j == len(arcs):
        return float(posts[-1])
    a0, a1 = float(arcs[j - 1]), float(arcs[j])
    p0, p1 = float(posts[j - 1]), float(posts[j])
    return p0 + (p1 - p0) * (f - a0) / (a1 - a0)


def _marker_projection(idx: TiledIndex, segment_id: str):
    cache = _marker_caches.setdefault(idx, {})
    if segment_id in cache:
        return cache[segment_id]

    seg = idx.segments.get(segment_id)
    result = None
    if seg is not None:
        markers = idx.mile_markers.get(seg.route.canonical_name, ())
        if len(markers) >= 2:
            arcs = [point_to_polyline(m.location, seg.geometry).arc_fraction for m in markers]
            posts = [float(m.post) for m in markers]
            flipped = arcs[-1] < arcs[0]
            if flipped:
                # Geometry runs against increasing posts; flip to a rising axis.
                arcs = [-a for a in arcs]
            pruned_posts, pruned_arcs = _prune_plateaus(posts, arcs)
            if len(pruned_arcs) >= 2 and _strictly_increasing(pruned_arcs):
                result = (np.array(pruned_posts), np.array(pruned_arcs), flipped)
    cache[segment_id] = result
    return result


def _prune_plateaus(posts: list[float], arcs: list[float]) -> tuple[list[float], list[float]]:
    """Collapse runs of equal projections.

    Markers beyond the geometry all clamp to an end; the leading run keeps its
    last marker and any other run keeps its first, so the surviving marker is
    the one physically nearest the geometry end.
    """
    runs: list[tuple[int, int]] = []
    start = 0
    for i in range(1, len(arcs) + 1):
        if i == len(arcs) or arcs[i] != arcs[start]:
            runs.append((start, i - 1))
            start = i
    keep: list[int] = []
    for ri, (s, e) in enumerate(runs):
        keep.append(e if ri == 0 else s)
    return [posts[i] for i in keep], [arcs[i] for i in keep]


def _strictly_increasing(values: list[float]) -> bool:
    return all(b > a for a, b in zip(values, values[1:]))


# --- matched-track interchange ------------------------------------------------


def matched_track_doc(day: date, vehicle_id: str, points: Sequence[MatchedPoint]) -> dict:
    """JSON document for one (day, vehicle) matched track."""
    return {
        "day": day.isoformat(),
        "vehicle_id": vehicle_id,
        "points": [
            {
                "t": mp.point.time.isoformat(),
                "lat": mp.point.location.lat,
                "lon": mp.point.location.lon,
                "road": mp.road,
                "class": mp.road_class.value if mp.road_class is not None else None,
                "milepost": mp.milepost,
                "snap_m": mp.snap_distance_m,
            }
            for mp in points
        ],
    }


def parse_track_doc(doc: dict) -> tuple[date, str, list[MatchedPoint]]:
    day = date.fromisoformat(doc["day"])
    vehicle_id = doc["vehicle_id"]
    points = []
    for row in doc["points"]:
        cls = RoadClass(row["class"]) if row["class"] is not None else None
        points.append(
            MatchedPoint(
                point=GpsPoint(
                    vehicle_id=vehicle_id,
                    time=datetime.fromisoformat(row["t"]),
                    location=Coordinate(row["lat"], row["lon"]),
                ),
                road=row["road"],
                road_class=cls,
                milepost=row["milepost"],
                snap_distance_m=row["snap_m"],
            )
        )
    return day, vehicle_id, points
