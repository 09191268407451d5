#!/usr/bin/env python3
"""Regenerate the viewer test fixtures by running the batch engine.

Writes frontend/tests/fixtures/: matched-track JSONs (one ordinary drive, one
out-and-back drive), the verification report (CSV + JSON) and the index's
segments.json. Deterministic, so the files only change when the engine does.

Usage: python3 frontend/scripts/make_fixtures.py
"""

import math
import shutil
import subprocess
import sys
import tempfile
from pathlib import Path

FRONTEND = Path(__file__).resolve().parent.parent
REPO = FRONTEND.parent
FIXTURES = FRONTEND / "tests" / "fixtures"

MILE_DEG_LON = 1609.344 / (111_320.0 * math.cos(math.radians(40.0)))


def lon_of(post: int | float) -> float:
    return -86.5 + (post - 10) * MILE_DEG_LON


def gps_rows():
    rows = []
    # V1: one-way drive along I-65, one minute sampling.
    for i in range(61):
        lon = lon_of(10) + (lon_of(20) - lon_of(10)) * (0.02 + 0.96 * i / 60)
        rows.append(f"V1,2021-01-15T{8 + i // 60:02d}:{i % 60:02d}:00,40.0,{lon!r}")
    # V2: out and back over the same stretch (two passes over one road).
    for i in range(40):
        f = i / 20 if i <= 20 else 2.0 - i / 20
        lon = lon_of(12) + (lon_of(18) - lon_of(12)) * f
        rows.append(f"V2,2021-01-15T{9 + i // 60:02d}:{i % 60:02d}:00,40.0,{lon!r}")
    return rows


def main() -> int:
    tmp = Path(tempfile.mkdtemp(prefix="viewer-fixtures-"))
    inventory = tmp / "inventory.csv"
    inventory.write_text(
        "SegmentId,RouteRef,StartPost,EndPost,StartOffset,EndOffset,Geometry\n"
        f'seg-i65,I-65,10,20,,,"LINESTRING ({lon_of(10)!r} 40.0, {lon_of(20)!r} 40.0)"\n',
        encoding="utf-8",
    )
    markers = tmp / "markers.csv"
    markers.write_text(
        "RouteRef,Post,Lat,Lon\n" + "".join(f"I-65,{p},40.0,{lon_of(p)!r}\n" for p in range(10, 21)),
        encoding="utf-8",
    )
    gps = tmp / "gps.csv"
    gps.write_text("VehicleId,Timestamp,Lat,Lon\n" + "\n".join(gps_rows()) + "\n", encoding="utf-8")
    orders = tmp / "orders.csv"
    orders.write_text(
        "WOId,VehicleId,Date,RouteRef,StartPost,EndPost,StartOffset,EndOffset,ReportedHrs\n"
        "WO-1,V1,2021-01-15,I-65,10,20,,,1.0\n"
        "WO-2,V2,2021-01-15,I-65,12,18,,,0.6\n"
        "WO-3,V2,2021-01-15,I-65,10,12,,,1.5\n"
        "WO-4,V9,2021-01-15,I-65,10,20,,,2.0\n",
        encoding="utf-8",
    )

    index = tmp / "index"
    matched = tmp / "matched"
    report = tmp / "verify.csv"
    cli = [sys.executable, "-m", "plowtrack.cli"]
    subprocess.run(cli + ["build-index", str(inventory), str(markers), "--out", str(index)], check=True)
    subprocess.run(cli + ["match", str(gps), "--index", str(index), "--out", str(matched)], check=True)
    subprocess.run(
        cli + ["verify", str(orders), "--matched", str(matched), "--index", str(index), "--out", str(report)],
        check=True,
    )

    if FIXTURES.exists():
        shutil.rmtree(FIXTURES)
    (FIXTURES / "matched").mkdir(parents=True)
    for path in sorted(matched.glob("*.json")):
        shutil.copy(path, FIXTURES / "matched" / path.name)
    shutil.copy(report, FIXTURES / "verify.csv")
    shutil.copy(report.with_suffix(".json"), FIXTURES / "verify.json")
    shutil.copy(index / "segments.json", FIXTURES / "segments.json")
    print(f"fixtures written to {FIXTURES}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
