import json
from pathlib import Path

from plowtrack.cli import main

from conftest import MILE_DEG_LON


def write(path: Path, text: str) -> Path:
    path.write_text(text, encoding="utf-8")
    return path


def lon_of(post, first_post=10):
    return -86.5 + (post - first_post) * MILE_DEG_LON


def make_inputs(tmp_path: Path):
    """Inventory with one marked interstate, GPS for a drive along it."""
    inv_rows = ["SegmentId,RouteRef,StartPost,EndPost,StartOffset,EndOffset,Geometry"]
    inv_rows.append(
        f'seg-i65,I-65,10,20,,,"LINESTRING ({lon_of(10)!r} 40.0, {lon_of(20)!r} 40.0)"'
    )
    inventory = write(tmp_path / "inventory.csv", "\n".join(inv_rows) + "\n")

    marker_rows = ["RouteRef,Post,Lat,Lon"]
    for post in range(10, 21):
        marker_rows.append(f"I-65,{post},40.0,{lon_of(post)!r}")
    markers = write(tmp_path / "markers.csv", "\n".join(marker_rows) + "\n")

    gps_rows = ["VehicleId,Timestamp,Lat,Lon"]
    for i in range(61):
        lon = lon_of(10) + (lon_of(20) - lon_of(10)) * (0.02 + 0.96 * i / 60)
        gps_rows.append(f"V1,2021-01-15T{8 + i // 60:02d}:{i % 60:02d}:00,40.0,{lon!r}")
    gps = write(tmp_path / "gps.csv", "\n".join(gps_rows) + "\n")

    return inventory, markers, gps


class TestBuildIndex:
    def test_build_succeeds_and_prints_counts(self, tmp_path, capsys):
        inventory, markers, _ = make_inputs(tmp_path)
        code = main(["build-index", str(inventory), str(markers), "--out", str(tmp_path / "index")])
        assert code == 0
        out = capsys.readouterr().out
        assert "1 segments" in out
        assert (tmp_path / "index" / "index-meta.json").exists()
        assert (tmp_path / "index" / "segments.json").exists()

    def test_duplicate_segment_exits_2(self, tmp_path):
        inventory, markers, _ = make_inputs(tmp_path)
        text = inventory.read_text()
        inventory.write_text(text + text.splitlines()[1] + "\n")
        code = main(["build-index", str(inventory), str(markers), "--out", str(tmp_path / "index")])
        assert code == 2

    def test_bad_inventory_exits_2(self, tmp_path):
        inventory, markers, _ = make_inputs(tmp_path)
        write(inventory, "SegmentId,RouteRef\nseg,I-65\n")
        assert main(["build-index", str(inventory), str(markers), "--out", str(tmp_path / "index")]) == 2

    def test_rebuild_is_byte_identical(self, tmp_path):
        inventory, markers, _ = make_inputs(tmp_path)
        out1 = tmp_path / "index1"
        out2 = tmp_path / "index2"
        assert main(["build-index", str(inventory), str(markers), "--out", str(out1)]) == 0
        assert main(["build-index", str(inventory), str(markers), "--out", str(out2)]) == 0
        files1 = sorted(p.relative_to(out1) for p in out1.rglob("*.json"))
        files2 = sorted(p.relative_to(out2) for p in out2.rglob("*.json"))
        assert files1 == files2
        for rel in files1:
            assert (out1 / rel).read_bytes() == (out2 / rel).read_bytes()


def build_and_match(tmp_path):
    inventory, markers, gps = make_inputs(tmp_path)
    index = tmp_path / "index"
    matched = tmp_path / "matched"
    assert main(["build-index", str(inventory), str(markers), "--out", str(index)]) == 0
    assert main(["match", str(gps), "--index", str(index), "--out", str(matched)]) == 0
    return index, matched


class TestMatch:
    def test_along_road_has_zero_off_road_fraction(self, tmp_path, capsys):
        build_and_match(tmp_path)
        out = capsys.readouterr().out
        assert "off-road fraction 0.0000" in out
        files = list((tmp_path / "matched").glob("2021-01-15_V1.json"))
        assert len(files) == 1
        doc = json.loads(files[0].read_text())
        assert len(doc["points"]) == 61
        assert all(p["road"] == "seg-i65" for p in doc["points"])

    def test_empty_gps_file(self, tmp_path):
        inventory, markers, gps = make_inputs(tmp_path)
        write(gps, "VehicleId,Timestamp,Lat,Lon\n")
        index = tmp_path / "index"
        assert main(["build-index", str(inventory), str(markers), "--out", str(index)]) == 0
        assert main(["match", str(gps), "--index", str(index), "--out", str(tmp_path / "matched")]) == 0
        assert list((tmp_path / "matched").glob("2021-*.json")) == []

    def test_corrupt_row_goes_to_rejects(self, tmp_path):
        inventory, markers, gps = make_inputs(tmp_path)
        gps.write_text(gps.read_text() + "V1,garbage,40.0,-86.5\n")
        index = tmp_path / "index"
        matched = tmp_path / "matched"
        assert main(["build-index", str(inventory), str(markers), "--out", str(index)]) == 0
        assert main(["match", str(gps), "--index", str(index), "--out", str(matched)]) == 0
        rejects = (matched / "rejects.csv").read_text().splitlines()
        assert rejects[0] == "Row,Reason"
        assert len(rejects) == 2

    def test_missing_index_exits_2(self, tmp_path):
        _, _, gps = make_inputs(tmp_path)
        assert main(["match", str(gps), "--index", str(tmp_path / "nope"), "--out", str(tmp_path / "m")]) == 2


WO_TEXT = """WOId,VehicleId,Date,RouteRef,StartPost,EndPost,StartOffset,EndOffset,ReportedHrs
WO-1,V1,2021-01-15,I-65,10,20,,,1.0
WO-2,V1,2021-01-15,I-65,10,20,,,0.9
WO-3,V9,2021-01-15,I-65,10,20,,,2.0
"""


class TestVerify:
    def test_summary_counts_and_reports(self, tmp_path, capsys):
        index, matched = build_and_match(tmp_path)
        capsys.readouterr()
        orders = write(tmp_path / "orders.csv", WO_TEXT)
        report = tmp_path / "verify.csv"
        code = main(["verify", str(orders), "--matched", str(matched), "--index", str(index), "--out", str(report)])
        assert code == 0
        out = capsys.readouterr().out
        assert "MATCH 2  MISMATCH 0  NO_DATA 1" in out
        lines = report.read_text().splitlines()
        header_at = next(i for i, l in enumerate(lines) if not l.startswith("#"))
        assert lines[header_at].startswith("WOId,VehicleId,Date")
        assert len(lines) - header_at - 1 == 3
        doc = json.loads(report.with_suffix(".json").read_text())
        assert len(doc["records"]) == 3
        assert doc["config"]["abs_tol"] == 0.25

    def test_rerun_byte_identical(self, tmp_path):
        index, matched = build_and_match(tmp_path)
        orders = write(tmp_path / "orders.csv", WO_TEXT)
        r1 = tmp_path / "verify1.csv"
        r2 = tmp_path / "verify2.csv"
        for report in (r1, r2):
            assert main(["verify", str(orders), "--matched", str(matched), "--index", str(index), "--out", str(report)]) == 0
        assert r1.read_bytes() == r2.read_bytes()
        assert r1.with_suffix(".json").read_bytes() == r2.with_suffix(".json").read_bytes()

    def test_tolerance_flags_change_status(self, tmp_path, capsys):
        index, matched = build_and_match(tmp_path)
        capsys.readouterr()
        orders = write(tmp_path / "orders.csv", WO_TEXT)
        report = tmp_path / "verify.csv"
        code = main([
            "verify", str(orders), "--matched", str(matched), "--index", str(index),
            "--out", str(report), "--abs-tol", "0.01", "--rel-tol", "0.0",
        ])
        assert code == 0
        assert "MATCH 1  MISMATCH 1  NO_DATA 1" in capsys.readouterr().out

    def test_schema_error_exits_2(self, tmp_path):
        index, matched = build_and_match(tmp_path)
        orders = write(tmp_path / "orders.csv", "WOId\nWO-1\n")
        assert main(["verify", str(orders), "--matched", str(matched), "--index", str(index), "--out", str(tmp_path / "v.csv")]) == 2


class TestCreate:
    def test_empty_activities(self, tmp_path):
        index, matched = build_and_match(tmp_path)
        activities = write(tmp_path / "acts.csv", "VehicleId,Date,RouteRef,StartPost,EndPost\n")
        report = tmp_path / "create.csv"
        assert main(["create", str(activities), "--matched", str(matched), "--index", str(index), "--out", str(report)]) == 0
        lines = report.read_text().splitlines()
        header_at = next(i for i, l in enumerate(lines) if not l.startswith("#"))
        assert len(lines) - header_at - 1 == 0

    def test_create_report_values(self, tmp_path):
        index, matched = build_and_match(tmp_path)
        activities = write(
            tmp_path / "acts.csv",
            "VehicleId,Date,RouteRef,StartPost,EndPost\nV1,2021-01-15,I-65,10,20\nV9,2021-01-15,I-65,10,20\n",
        )
        report = tmp_path / "create.csv"
        assert main(["create", str(activities), "--matched", str(matched), "--index", str(index), "--out", str(report)]) == 0
        lines = [l for l in report.read_text().splitlines() if not l.startswith("#")]
        assert lines[1].split(",")[5] == "1.00"
        assert lines[2].split(",")[8] == "NO_DATA"


class TestStats:
    def test_stats_output(self, tmp_path, capsys):
        _, _, gps = make_inputs(tmp_path)
        out_json = tmp_path / "stats.json"
        assert main(["stats", str(gps), "--out", str(out_json)]) == 0
        out = capsys.readouterr().out
        assert "61 points, 1 tracks" in out
        assert "exactly 1 min: 1.0000" in out
        doc = json.loads(out_json.read_text())
        assert doc["total_points"] == 61
        assert doc["fraction_exactly_1min"] == 1.0

    def test_bad_tz_exits_2(self, tmp_path):
        _, _, gps = make_inputs(tmp_path)
        assert main(["stats", str(gps), "--tz", "Mars/Olympus"]) == 2


class TestConfigFile:
    def test_config_file_and_override(self, tmp_path, capsys):
        _, _, gps = make_inputs(tmp_path)
        config = write(tmp_path / "run.cfg", "# comment\ncap_seconds = 300\nabs_tol = 0.5\n")
        out_json = tmp_path / "stats.json"
        assert main(["stats", str(gps), "--config", str(config), "--out", str(out_json)]) == 0
        doc = json.loads(out_json.read_text())
        assert doc["config"]["cap_seconds"] == 300.0
        assert doc["config"]["abs_tol"] == 0.5

    def test_unknown_key_exits_2(self, tmp_path):
        _, _, gps = make_inputs(tmp_path)
        config = write(tmp_path / "run.cfg", "nonsense = 1\n")
        assert main(["stats", str(gps), "--config", str(config)]) == 2
