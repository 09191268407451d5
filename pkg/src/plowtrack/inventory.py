"""Road inventory model: linearly referenced segments, mile markers, route
reference parsing, and the geohash-tiled spatial index.

Input formats (delimiter-separated, header row; comma, tab, semicolon or pipe):

* Inventory table: ``SegmentId, RouteRef, StartPost, EndPost, StartOffset,
  EndOffset, Geometry``. Geometry is WKT ``LINESTRING (lon lat, lon lat, ...)``;
  blank post/offset cells mean absent.
* Mile-marker table: ``RouteRef, Post, Lat, Lon``.
"""

from __future__ import annotations

import csv
import io
import math
import re
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .errors import BuildError, FormatError, RouteParseError
from .geo import Coordinate, Polyline, geohash_encode, geohash_neighbors, point_to_polyline

DEFAULT_PRECISION = 5
DEFAULT_BUFFER_M = 250.0  # must cover the largest snap threshold used at query time


class RoadClass(Enum):
    INTERSTATE = "Interstate"
    STATE_ROAD = "StateRoad"
    LOCAL_ROAD = "LocalRoad"


@dataclass(frozen=True)
class RouteRef:
    """Parsed road name: classification plus canonical spelling."""

    raw: str
    road_class: RoadClass
    canonical_name: str


# Prefix table for classified routes; US routes fold into StateRoad because the
# selection hierarchy only distinguishes interstate / state / local.
_PREFIXES = (
    ("I-", RoadClass.INTERSTATE, "I"),
    ("I ", RoadClass.INTERSTATE, "I"),
    ("US-", RoadClass.STATE_ROAD, "US"),
    ("US ", RoadClass.STATE_ROAD, "US"),
    ("S.R.", RoadClass.STATE_ROAD, "SR"),
    ("SR-", RoadClass.STATE_ROAD, "SR"),
    ("SR ", RoadClass.STATE_ROAD, "SR"),
)


def road_name_to_type(raw: str) -> RouteRef:
    """Classify a route reference and derive its canonical name.

    Unknown prefixes degrade to LocalRoad (canonical name = trimmed input);
    blank input raises RouteParseError.
    """
    name = raw.strip()
    if not name:
        raise RouteParseError("blank route reference")
    upper = name.upper()
    for prefix, road_class, base in _PREFIXES:
        if upper.startswith(prefix):
            rest = name[len(prefix) :].strip(" .-")
            if rest:
                rest = re.sub(r"[\s.]+", "-", rest.upper())
                return RouteRef(raw=raw, road_class=road_class, canonical_name=f"{base}-{rest}")
    return RouteRef(raw=raw, road_class=RoadClass.LOCAL_ROAD, canonical_name=name)


@dataclass
class RoadSegment:
    segment_id: str
    route: RouteRef
    geometry: Polyline
    start_post: int | None = None
    end_post: int | None = None
    start_offset: float | None = None
    end_offset: float | None = None

    def __post_init__(self) -> None:
        if not self.segment_id:
            raise ValueError("segment_id must be non-empty")
        if self.start_post is not None and self.end_post is not None:
            if self.start_post > self.end_post:
                raise ValueError(f"{self.segment_id}: start_post {self.start_post} > end_post {self.end_post}")
        if self.start_offset is not None and self.start_post is None:
            raise ValueError(f"{self.segment_id}: start_offset without start_post")
        if self.end_offset is not None and self.end_post is None:
            raise ValueError(f"{self.segment_id}: end_offset without end_post")
        for off in (self.start_offset, self.end_offset):
            if off is not None and not abs(off) < 1.0:
                raise ValueError(f"{self.segment_id}: offset {off} must satisfy |offset| < 1 mile")


@dataclass(frozen=True)
class MileMarker:
    route: RouteRef
    post: int
    location: Coordinate

    def __post_init__(self) -> None:
        if self.post < 0:
            raise ValueError(f"mile marker post must be non-negative, got {self.post}")


@dataclass(frozen=True)
class GeohashTile:
    tile_id: str
    segment_ids: tuple[str, ...]


class TiledIndex:
    """Immutable geohash-tiled index over segments plus per-route markers.

    Tiles reference segments by id; full geometries live once in ``segments``.
    Safe for concurrent reads after construction (internal caches are
    populate-once memos).
    """

    def __init__(
        self,
        precision: int,
        buffer_m: float,
        segments: dict[str, RoadSegment],
        tiles: dict[str, GeohashTile],
        mile_markers: dict[str, tuple[MileMarker, ...]],
    ):
        self.precision = precision
        self.buffer_m = buffer_m
        self.segments = segments
        self.tiles = tiles
        self.mile_markers = mile_markers
        self._route_geoms: dict[str, Polyline | None] = {}
        self._segment_routes: dict[str, str] | None = None

    def segment_routes(self) -> Mapping[str, str]:
        """segment_id -> canonical route name, for route membership checks."""
        if self._segment_routes is None:
            self._segment_routes = {
                sid: seg.route.canonical_name for sid, seg in self.segments.items()
            }
        return self._segment_routes


def build_index(
    segments: Iterable[RoadSegment],
    markers: Iterable[MileMarker],
    precision: int = DEFAULT_PRECISION,
    buffer_m: float = DEFAULT_BUFFER_M,
) -> TiledIndex:
    """Register every segment in every tile its geometry passes through.

    Tile boxes are inflated by ``buffer_m`` so that a query from just inside a
    neighboring cell still finds near-boundary segments.
    """
    if not 4 <= precision <= 7:
        raise ValueError(f"index precision must be in [4, 7], got {precision}")
    if buffer_m <= 0:
        raise ValueError("buffer_m must be positive")

    seg_map: dict[str, RoadSegment] = {}
    for seg in segments:
        if seg.segment_id in seg_map:
            raise BuildError(f"duplicate segment id {seg.segment_id!r}")
        seg_map[seg.segment_id] = seg
    seg_map = dict(sorted(seg_map.items()))

    tile_lists: dict[str, list[str]] = {}
    for sid, seg in seg_map.items():
        for cell in _cells_for_polyline(seg.geometry, precision, buffer_m):
            tile_lists.setdefault(cell, []).append(sid)
    tiles = {
        cell: GeohashTile(tile_id=cell, segment_ids=tuple(sorted(ids)))
        for cell, ids in sorted(tile_lists.items())
    }

    grouped: dict[str, dict[int, MileMarker]] = {}
    for marker in markers:
        name = marker.route.canonical_name
        per_route = grouped.setdefault(name, {})
        if marker.post in per_route:
            raise BuildError(f"duplicate mile marker ({name!r}, {marker.post})")
        # Store the canonical spelling so persistence round-trips exactly.
        per_route[marker.post] = MileMarker(
            route=road_name_to_type(name), post=marker.post, location=marker.location
        )
    marker_map = {
        name: tuple(per_route[post] for post in sorted(per_route))
        for name, per_route in sorted(grouped.items())
    }

    return TiledIndex(
        precision=precision,
        buffer_m=float(buffer_m),
        segments=seg_map,
        tiles=tiles,
        mile_markers=marker_map,
    )


def tiles_for_query(idx: TiledIndex, p: Coordinate) -> list[GeohashTile]:
    """Tiles for the point's cell and its neighbors; missing tiles omitted."""
    cells = geohash_neighbors(geohash_encode(p, idx.precision))
    return [idx.tiles[c] for c in sorted(cells) if c in idx.tiles]


def route_geometry(idx: TiledIndex, canonical_name: str) -> Polyline | None:
    """One polyline for a route, concatenating its segments by start post."""
    if canonical_name in idx._route_geoms:
        return idx._route_geoms[canonical_name]
    segs = [s for s in idx.segments.values() if s.route.canonical_name == canonical_name]
    segs.sort(key=lambda s: (s.start_post is None, s.start_post or 0, s.segment_id))
    vertices: list[Coordinate] = []
    for seg in segs:
        for v in seg.geometry.vertices:
            if vertices and v.lat == vertices[-1].lat and v.lon == vertices[-1].lon:
                continue
            vertices.append(v)
    geom = Polyline(vertices) if len(vertices) >= 2 else None
    idx._route_geoms[canonical_name] = geom
    return geom


def synthesize_mile_segments(idx: TiledIndex, route: RouteRef) -> list[RoadSegment]:
    """Non-overlapping segments between consecutive mile markers of a route.

    Geometry is cut from the route geometry between the markers' projections;
    degenerate (zero-length) cuts are dropped.
    """
    canonical = route.canonical_name
    markers = idx.mile_markers.get(canonical, ())
    if len(markers) < 2:
        return []
    geom = route_geometry(idx, canonical)
    if geom is None:
        return []
    arcs = [point_to_polyline(m.location, geom).arc_fraction for m in markers]
    out: list[RoadSegment] = []
    for m0, m1, f0, f1 in zip(markers, markers[1:], arcs, arcs[1:]):
        lo, hi = min(f0, f1), max(f0, f1)
        try:
            piece = geom.slice_fraction(lo, hi)
        except ValueError:
            continue
        out.append(
            RoadSegment(
                segment_id=f"{canonical}:mm{m0.post}-{m1.post}",
                route=route,
                geometry=piece,
                start_post=m0.post,
                end_post=m1.post,
            )
        )
    return out


# --- tiling internals -------------------------------------------------------


def _cells_for_polyline(line: Polyline, precision: int, buffer_m: float) -> list[str]:
    lat_bits = (5 * precision) // 2
    lon_bits = 5 * precision - lat_bits
    lat_step = 180.0 / (1 << lat_bits)
    lon_step = 360.0 / (1 << lon_bits)

    lat_min = float(line.lats.min())
    lat_max = float(line.lats.max())
    lon_min = float(line.lons.min())
    lon_max = float(line.lons.max())
    blat, blon = _buffer_degrees(buffer_m, max(abs(lat_min), abs(lat_max)))

    i_lo = max(0, int(math.floor((lat_min - blat + 90.0) / lat_step)))
    i_hi = min((1 << lat_bits) - 1, int(math.floor((lat_max + blat + 90.0) / lat_step)))
    j_lo = int(math.floor((lon_min - blon + 180.0) / lon_step))
    j_hi = int(math.floor((lon_max + blon + 180.0) / lon_step))

    edges = list(zip(line.lats[:-1], line.lons[:-1], line.lats[1:], line.lons[1:]))
    cells: list[str] = []
    for i in range(i_lo, i_hi + 1):
        cell_lat_lo = -90.0 + i * lat_step
        for j in range(j_lo, j_hi + 1):
            jw = j % (1 << lon_bits)
            cell_lon_lo = -180.0 + jw * lon_step
            box = (
                cell_lon_lo - blon,
                cell_lat_lo - blat,
                cell_lon_lo + lon_step + blon,
                cell_lat_lo + lat_step + blat,
            )
            if any(_segment_hits_box(lo1, la1, lo2, la2, box) for la1, lo1, la2, lo2 in edges):
                center = Coordinate(cell_lat_lo + lat_step / 2, cell_lon_lo + lon_step / 2)
                cells.append(geohash_encode(center, precision))
    return cells


def _buffer_degrees(buffer_m: float, max_abs_lat: float) -> tuple[float, float]:
    # Conservative meter->degree conversion (slightly over-inflates).
    blat = buffer_m / 110_000.0
    coslat = math.cos(math.radians(min(89.0, max_abs_lat + blat)))
    blon = min(180.0, buffer_m / (111_320.0 * max(0.017, coslat)))
    return blat, blon


def _segment_hits_box(x1, y1, x2, y2, box) -> bool:
    # Liang-Barsky clip: True if any part of the segment lies inside the box.
    xmin, ymin, xmax, ymax = box
    dx = x2 - x1
    dy = y2 - y1
    t0, t1 = 0.0, 1.0
    for p, q in ((-dx, x1 - xmin), (dx, xmax - x1), (-dy, y1 - ymin), (dy, ymax - y1)):
        if p == 0.0:
            if q < 0.0:
                return False
        else:
            r = q / p
            if p < 0.0:
                t0 = max(t0, r)
            else:
                t1 = min(t1, r)
            if t0 > t1:
                return False
    return True


# --- file loading -----------------------------------------------------------

INVENTORY_COLUMNS = ("SegmentId", "RouteRef", "StartPost", "EndPost", "StartOffset", "EndOffset", "Geometry")
MARKER_COLUMNS = ("RouteRef", "Post", "Lat", "Lon")

_WKT_LINESTRING = re.compile(r"^\s*LINESTRING\s*\(\s*(.*?)\s*\)\s*$", re.IGNORECASE | re.DOTALL)


def parse_wkt_linestring(text: str) -> Polyline:
    """Parse WKT ``LINESTRING (lon lat, ...)`` into a polyline."""
    m = _WKT_LINESTRING.match(text)
    if not m:
        raise ValueError(f"not a WKT LINESTRING: {text[:60]!r}")
    vertices = []
    for part in m.group(1).split(","):
        fields = part.split()
        if len(fields) != 2:
            raise ValueError(f"bad LINESTRING vertex {part.strip()!r}")
        lon, lat = (float(x) for x in fields)
        vertices.append(Coordinate(lat, lon))
    return Polyline(vertices)


def format_wkt_linestring(line: Polyline) -> str:
    inner = ", ".join(f"{float(lo)!r} {float(la)!r}" for la, lo in zip(line.lats, line.lons))
    return f"LINESTRING ({inner})"


def sniff_delimiter(header_line: str) -> str:
    counts = [(header_line.count(d), -i, d) for i, d in enumerate((",", "\t", ";", "|"))]
    best = max(counts)
    return best[2] if best[0] > 0 else ","


def open_table(source, required: Sequence[str]) -> tuple[csv.DictReader, str]:
    """DictReader over a path, text stream or byte stream, validating columns."""
    if isinstance(source, (str, Path)):
        name = str(source)
        stream: io.TextIOBase = io.StringIO(Path(source).read_text(encoding="utf-8"))
    else:
        name = getattr(source, "name", "<stream>")
        data = source.read()
        if isinstance(data, bytes):
            data = data.decode("utf-8")
        stream = io.StringIO(data)
    first = stream.readline()
    if not first:
        raise FormatError("empty file (missing header row)", file=name)
    delimiter = sniff_delimiter(first.rstrip("\r\n"))
    header = next(csv.reader(io.StringIO(first), delimiter=delimiter))
    header = [h.strip() for h in header]
    for col in required:
        if col not in header:
            raise FormatError(f"missing required column {col!r}", file=name, line=1)
    reader = csv.DictReader(stream, fieldnames=header, delimiter=delimiter)
    return reader, name


def _parse_optional_int(cell: str | None, what: str) -> int | None:
    if cell is None or not cell.strip():
        return None
    try:
        return int(cell.strip())
    except ValueError:
        raise ValueError(f"bad {what} {cell!r}") from None


def _parse_optional_float(cell: str | None, what: str) -> float | None:
    if cell is None or not cell.strip():
        return None
    try:
        return float(cell.strip())
    except ValueError:
        raise ValueError(f"bad {what} {cell!r}") from None


def load_inventory(source) -> list[RoadSegment]:
    """Load road segments; any malformed row is a fatal format error."""
    reader, name = open_table(source, INVENTORY_COLUMNS)
    segments = []
    for line_no, row in enumerate(reader, start=2):
        try:
            route = road_name_to_type(row["RouteRef"] or "")
            segments.append(
                RoadSegment(
                    segment_id=(row["SegmentId"] or "").strip(),
                    route=route,
                    geometry=parse_wkt_linestring(row["Geometry"] or ""),
                    start_post=_parse_optional_int(row["StartPost"], "StartPost"),
                    end_post=_parse_optional_int(row["EndPost"], "EndPost"),
                    start_offset=_parse_optional_float(row["StartOffset"], "StartOffset"),
                    end_offset=_parse_optional_float(row["EndOffset"], "EndOffset"),
                )
            )
        except (ValueError, RouteParseError) as exc:
            raise FormatError(str(exc), file=name, line=line_no) from exc
    return segments


def load_mile_markers(source) -> list[MileMarker]:
    reader, name = open_table(source, MARKER_COLUMNS)
    markers = []
    for line_no, row in enumerate(reader, start=2):
        try:
            markers.append(
                MileMarker(
                    route=road_name_to_type(row["RouteRef"] or ""),
                    post=int((row["Post"] or "").strip()),
                    location=Coordinate(float(row["Lat"]), float(row["Lon"])),
                )
            )
        except (ValueError, RouteParseError) as exc:
            raise FormatError(str(exc), file=name, line=line_no) from exc
    return markers
