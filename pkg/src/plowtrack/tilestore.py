"""JSON tile store for the spatial index.

Layout under the index directory (all UTF-8, keys in the fixed order shown so
rebuilds from identical input are byte-identical):

* ``index-meta.json``   {"format", "precision", "buffer_m", "thresholds"}
* ``segments.json``     {"segments": [{"id", "route_ref", "start_post",
                         "end_post", "start_offset", "end_offset",
                         "geometry": [[lon, lat], ...]}, ...]} sorted by id
* ``<geohash>.json``    {"tile", "segments": [ids...]} one per tile
* ``markers/<route>.json``  {"route", "markers": [{"post", "lat", "lon"}, ...]}
"""

from __future__ import annotations

import json
import os
import re
from pathlib import Path

from .errors import FormatError
from .geo import Coordinate, Polyline
from .inventory import (
    GeohashTile,
    MileMarker,
    RoadSegment,
    TiledIndex,
    road_name_to_type,
)

META_FILE = "index-meta.json"
SEGMENTS_FILE = "segments.json"
MARKERS_DIR = "markers"
FORMAT_TAG = "plowtrack-tiles/1"

_SAFE_NAME = re.compile(r"[^A-Za-z0-9._-]")


def write_tiles(idx: TiledIndex, directory, thresholds: dict | None = None) -> int:
    """Persist an index; returns the number of files written."""
    root = Path(directory)
    root.mkdir(parents=True, exist_ok=True)
    (root / MARKERS_DIR).mkdir(exist_ok=True)

    count = 0
    meta = {
        "format": FORMAT_TAG,
        "precision": idx.precision,
        "buffer_m": idx.buffer_m,
        "thresholds": thresholds,
    }
    _write_json(root / META_FILE, meta)
    count += 1

    seg_rows = []
    for sid, seg in sorted(idx.segments.items()):
        seg_rows.append(
            {
                "id": sid,
                "route_ref": seg.route.raw,
                "start_post": seg.start_post,
                "end_post": seg.end_post,
                "start_offset": seg.start_offset,
                "end_offset": seg.end_offset,
                "geometry": [[float(lo), float(la)] for la, lo in zip(seg.geometry.lats, seg.geometry.lons)],
            }
        )
    _write_json(root / SEGMENTS_FILE, {"segments": seg_rows})
    count += 1

    for tile_id, tile in sorted(idx.tiles.items()):
        _write_json(root / f"{tile_id}.json", {"tile": tile_id, "segments": list(tile.segment_ids)})
        count += 1

    for name, markers in sorted(idx.mile_markers.items()):
        doc = {
            "route": name,
            "markers": [
                {"post": m.post, "lat": m.location.lat, "lon": m.location.lon} for m in markers
            ],
        }
        _write_json(root / MARKERS_DIR / f"{_safe_filename(name)}.json", doc)
        count += 1
    return count


def read_tile(directory, tile_id: str) -> GeohashTile | None:
    """Read one tile file; returns None when the tile does not exist."""
    path = Path(directory) / f"{tile_id}.json"
    if not path.exists():
        return None
    doc = _read_json(path)
    try:
        return GeohashTile(tile_id=doc["tile"], segment_ids=tuple(doc["segments"]))
    except (KeyError, TypeError) as exc:
        raise FormatError(f"malformed tile file: {exc}", file=str(path)) from exc


def read_index(directory) -> TiledIndex:
    """Load a full index previously written by write_tiles."""
    root = Path(directory)
    meta_path = root / META_FILE
    if not meta_path.exists():
        raise FormatError("missing index-meta.json (not an index directory)", file=str(root))
    meta = _read_json(meta_path)
    if meta.get("format") != FORMAT_TAG:
        raise FormatError(f"unsupported index format {meta.get('format')!r}", file=str(meta_path))

    segments: dict[str, RoadSegment] = {}
    seg_path = root / SEGMENTS_FILE
    for row in _read_json(seg_path).get("segments", []):
        try:
            vertices = [Coordinate(la, lo) for lo, la in row["geometry"]]
            seg = RoadSegment(
                segment_id=row["id"],
                route=road_name_to_type(row["route_ref"]),
                geometry=Polyline(vertices),
                start_post=row["start_post"],
                end_post=row["end_post"],
                start_offset=row["start_offset"],
                end_offset=row["end_offset"],
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"malformed segment entry: {exc}", file=str(seg_path)) from exc
        segments[seg.segment_id] = seg
    segments = dict(sorted(segments.items()))

    tiles: dict[str, GeohashTile] = {}
    for path in sorted(root.glob("*.json")):
        if path.name in (META_FILE, SEGMENTS_FILE):
            continue
        tile = read_tile(root, path.stem)
        if tile is not None:
            tiles[tile.tile_id] = tile

    markers: dict[str, tuple[MileMarker, ...]] = {}
    markers_dir = root / MARKERS_DIR
    if markers_dir.is_dir():
        for path in sorted(markers_dir.glob("*.json")):
            doc = _read_json(path)
            try:
                route = road_name_to_type(doc["route"])
                markers[doc["route"]] = tuple(
                    MileMarker(route=route, post=m["post"], location=Coordinate(m["lat"], m["lon"]))
                    for m in doc["markers"]
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise FormatError(f"malformed marker file: {exc}", file=str(path)) from exc
    markers = dict(sorted(markers.items()))

    return TiledIndex(
        precision=meta["precision"],
        buffer_m=meta["buffer_m"],
        segments=segments,
        tiles=tiles,
        mile_markers=markers,
    )


def _safe_filename(name: str) -> str:
    return _SAFE_NAME.sub("_", name)


def _write_json(path: Path, obj) -> None:
    data = json.dumps(obj, ensure_ascii=False, separators=(",", ":"))
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(data + "\n", encoding="utf-8")
    os.replace(tmp, path)


def _read_json(path: Path):
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc}", file=str(path)) from exc
