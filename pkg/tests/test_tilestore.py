import json

import pytest

from plowtrack.errors import FormatError
from plowtrack.geo import Coordinate, Polyline
from plowtrack.inventory import MileMarker, RoadSegment, build_index, road_name_to_type
from plowtrack.tilestore import read_index, read_tile, write_tiles

from conftest import route_with_markers


def three_tile_index():
    # Three segments in separate regions, two marked routes.
    mk = lambda sid, raw, lat, lon: RoadSegment(
        sid, road_name_to_type(raw),
        Polyline([Coordinate(lat, lon), Coordinate(lat, lon + 0.002)]),
        start_post=1, end_post=2, start_offset=-0.25, end_offset=0.5,
    )
    segments = [
        mk("a", "I-65", 40.02, -86.48),
        mk("b", "sr 26", 40.52, -86.02),
        mk("c", "Main Street", 39.52, -87.02),
    ]
    markers = [
        MileMarker(road_name_to_type("I-65"), 1, Coordinate(40.02, -86.48)),
        MileMarker(road_name_to_type("I-65"), 2, Coordinate(40.02, -86.47)),
        MileMarker(road_name_to_type("sr 26"), 7, Coordinate(40.52, -86.02)),
    ]
    return build_index(segments, markers)


def assert_index_equal(a, b):
    assert a.precision == b.precision
    assert a.buffer_m == b.buffer_m
    assert a.tiles == b.tiles
    assert a.mile_markers == b.mile_markers
    assert set(a.segments) == set(b.segments)
    for sid in a.segments:
        assert a.segments[sid] == b.segments[sid]


class TestRoundTrip:
    def test_write_then_read_every_tile(self, tmp_path):
        idx = three_tile_index()
        write_tiles(idx, tmp_path)
        for tile_id, tile in idx.tiles.items():
            assert read_tile(tmp_path, tile_id) == tile

    def test_read_of_missing_tile_is_none(self, tmp_path):
        write_tiles(three_tile_index(), tmp_path)
        assert read_tile(tmp_path, "zzzzz") is None

    def test_file_count(self, tmp_path):
        idx = three_tile_index()
        assert len(idx.tiles) == 3
        assert len(idx.mile_markers) == 2
        count = write_tiles(idx, tmp_path)
        tile_files = [p for p in tmp_path.glob("*.json") if p.name not in ("index-meta.json", "segments.json")]
        marker_files = list((tmp_path / "markers").glob("*.json"))
        assert len(tile_files) == 3
        assert len(marker_files) == 2
        # 3 tiles + 2 marker routes + meta + shared segment geometry
        assert count == 3 + 2 + 1 + 1

    def test_full_index_round_trip(self, tmp_path):
        idx = three_tile_index()
        write_tiles(idx, tmp_path, thresholds={"hint_m": 250.0})
        loaded = read_index(tmp_path)
        assert_index_equal(idx, loaded)

    def test_round_trip_with_full_route_fixture(self, tmp_path):
        segments, markers = route_with_markers()
        idx = build_index(segments, markers)
        write_tiles(idx, tmp_path)
        assert_index_equal(idx, read_index(tmp_path))

    def test_rewrite_is_byte_identical(self, tmp_path):
        idx = three_tile_index()
        d1 = tmp_path / "one"
        d2 = tmp_path / "two"
        write_tiles(idx, d1)
        write_tiles(idx, d2)
        files1 = sorted(p.relative_to(d1) for p in d1.rglob("*.json"))
        files2 = sorted(p.relative_to(d2) for p in d2.rglob("*.json"))
        assert files1 == files2
        for rel in files1:
            assert (d1 / rel).read_bytes() == (d2 / rel).read_bytes()


class TestErrors:
    def test_malformed_tile_file(self, tmp_path):
        write_tiles(three_tile_index(), tmp_path)
        victim = next(
            p for p in tmp_path.glob("*.json") if p.name not in ("index-meta.json", "segments.json")
        )
        victim.write_text("{not json", encoding="utf-8")
        with pytest.raises(FormatError) as err:
            read_tile(tmp_path, victim.stem)
        assert victim.name in str(err.value)

    def test_missing_meta(self, tmp_path):
        with pytest.raises(FormatError):
            read_index(tmp_path)

    def test_meta_records_precision_and_thresholds(self, tmp_path):
        idx = three_tile_index()
        thresholds = {"interstate_m": 200.0, "state_m": 100.0, "local_m": 50.0, "hint_m": 250.0}
        write_tiles(idx, tmp_path, thresholds=thresholds)
        meta = json.loads((tmp_path / "index-meta.json").read_text())
        assert meta["precision"] == idx.precision
        assert meta["buffer_m"] == idx.buffer_m
        assert meta["thresholds"] == thresholds
