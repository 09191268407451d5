"""Command-line batch surface.

Subcommands: build-index, match, verify, create, stats. Reports are written
atomically (temp file + rename), carry the resolved configuration as header
comments, and are byte-identical across re-runs on identical inputs.

Exit codes: 0 success, 2 input/format error, 1 internal error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import re
import sys
from datetime import date
from pathlib import Path

from .config import RunConfig, load_config
from .errors import BuildError, FormatError, PlowtrackError
from .inventory import TiledIndex, load_inventory, load_mile_markers, build_index
from .matching import MatchedPoint, match_track, matched_track_doc, parse_track_doc
from .tilestore import read_index, write_tiles
from .tracks import RejectedRow, ingest_gps, sampling_stats
from .workorders import (
    CREATE_HEADER,
    STATUS_MATCH,
    STATUS_MISMATCH,
    STATUS_NO_DATA,
    VERIFY_HEADER,
    create_orders,
    creation_report_json,
    creation_report_rows,
    parse_activities,
    parse_work_orders,
    spread_histogram,
    verification_report_json,
    verification_report_rows,
    verify,
)

_SAFE = re.compile(r"[^A-Za-z0-9._-]")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = resolve_config(args)
        return args.func(args, config)
    except (FormatError, BuildError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except PlowtrackError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="plowtrack", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", help="key=value config file")
        p.add_argument("--tz", help="timezone for day grouping")
        p.add_argument("--precision", type=int, help="geohash precision of the index")
        p.add_argument("--cap-seconds", type=float, dest="cap_seconds", help="per-gap duration cap")
        p.add_argument("--abs-tol", type=float, dest="abs_tol", help="verification absolute tolerance (hours)")
        p.add_argument("--rel-tol", type=float, dest="rel_tol", help="verification relative tolerance")

    p = sub.add_parser("build-index", help="build and persist the tiled road index")
    p.add_argument("inventory", help="road inventory table")
    p.add_argument("markers", help="mile marker table")
    p.add_argument("--out", required=True, help="output index directory")
    common(p)
    p.set_defaults(func=cmd_build_index)

    p = sub.add_parser("match", help="map-match GPS tracks against an index")
    p.add_argument("gps", help="GPS point table")
    p.add_argument("--index", required=True, help="index directory")
    p.add_argument("--out", required=True, help="output directory for matched tracks")
    common(p)
    p.set_defaults(func=cmd_match)

    p = sub.add_parser("verify", help="verify work orders against matched tracks")
    p.add_argument("orders", help="work order table")
    p.add_argument("--matched", required=True, help="matched-track directory")
    p.add_argument("--index", required=True, help="index directory")
    p.add_argument("--out", required=True, help="report path (.csv; a .json twin is written)")
    common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("create", help="compute hours for vehicle activities")
    p.add_argument("activities", help="vehicle activity table")
    p.add_argument("--matched", required=True, help="matched-track directory")
    p.add_argument("--index", required=True, help="index directory")
    p.add_argument("--out", required=True, help="report path (.csv; a .json twin is written)")
    common(p)
    p.set_defaults(func=cmd_create)

    p = sub.add_parser("stats", help="sampling-interval statistics of a GPS file")
    p.add_argument("gps", help="GPS point table")
    p.add_argument("--out", help="optional JSON stats output")
    common(p)
    p.set_defaults(func=cmd_stats)

    return parser


def resolve_config(args) -> RunConfig:
    config = load_config(args.config) if getattr(args, "config", None) else RunConfig()
    if getattr(args, "tz", None):
        config.timezone = args.tz
    for flag in ("precision", "cap_seconds", "abs_tol", "rel_tol"):
        value = getattr(args, flag, None)
        if value is not None:
            setattr(config, flag, value)
    config.validate()
    return config


def cmd_build_index(args, config: RunConfig) -> int:
    segments = load_inventory(args.inventory)
    markers = load_mile_markers(args.markers)
    idx = build_index(
        segments, markers, precision=config.precision, buffer_m=config.thresholds().max_snap_m
    )
    n_files = write_tiles(idx, args.out, thresholds=threshold_dict(config))
    print(
        f"{len(idx.segments)} segments, {len(idx.tiles)} tiles, "
        f"{sum(len(m) for m in idx.mile_markers.values())} markers ({n_files} files)"
    )
    return 0


def cmd_match(args, config: RunConfig) -> int:
    idx = load_index_checked(args.index, config)
    result = ingest_gps(args.gps, tz=config.timezone)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    thresholds = config.thresholds()
    total = 0
    off_road = 0
    for (day, vehicle_id), track in result.tracks.items():
        matched = match_track(idx, track, thresholds)
        total += len(matched)
        off_road += sum(1 for mp in matched if mp.road is None)
        doc = matched_track_doc(day, vehicle_id, matched)
        name = f"{day.isoformat()}_{_SAFE.sub('_', vehicle_id)}.json"
        write_text(out_dir / name, json.dumps(doc, ensure_ascii=False, separators=(",", ":")) + "\n")

    write_rejects(out_dir / "rejects.csv", result.rejects)
    fraction = off_road / total if total else 0.0
    print(
        f"{total} points in {len(result.tracks)} tracks; "
        f"off-road fraction {fraction:.4f}; "
        f"{len(result.rejects)} rejected rows, {result.duplicates} duplicates"
    )
    return 0


def cmd_verify(args, config: RunConfig) -> int:
    idx = load_index_checked(args.index, config)
    orders, rejects = parse_work_orders(args.orders)
    matched = read_matched_dir(args.matched)
    records = verify(
        orders, matched, idx,
        abs_tol=config.abs_tol, rel_tol=config.rel_tol, cap_seconds=config.cap_seconds,
    )

    out = Path(args.out)
    write_report_csv(out, config, VERIFY_HEADER, verification_report_rows(records))
    write_report_json(out.with_suffix(".json"), config, "records", verification_report_json(records))
    write_rejects(Path(str(out) + ".rejects.csv"), rejects)

    counts = {STATUS_MATCH: 0, STATUS_MISMATCH: 0, STATUS_NO_DATA: 0}
    for rec in records:
        counts[rec.status] += 1
    histogram = spread_histogram(orders)
    print(
        f"MATCH {counts[STATUS_MATCH]}  MISMATCH {counts[STATUS_MISMATCH]}  "
        f"NO_DATA {counts[STATUS_NO_DATA]}  (orders {len(records)}, rejected rows {len(rejects)})"
    )
    print("day spread: " + (" ".join(f"{k}:{v}" for k, v in histogram.items()) or "none"))
    return 0


def cmd_create(args, config: RunConfig) -> int:
    idx = load_index_checked(args.index, config)
    activities, rejects = parse_activities(args.activities)
    matched = read_matched_dir(args.matched)
    records = create_orders(activities, matched, idx, cap_seconds=config.cap_seconds)

    out = Path(args.out)
    write_report_csv(out, config, CREATE_HEADER, creation_report_rows(records))
    write_report_json(out.with_suffix(".json"), config, "records", creation_report_json(records))
    write_rejects(Path(str(out) + ".rejects.csv"), rejects)

    zero = sum(1 for r in records if r.total_hours == 0.0)
    print(f"{len(records)} activities computed ({zero} with zero hours, {len(rejects)} rejected rows)")
    return 0


def cmd_stats(args, config: RunConfig) -> int:
    result = ingest_gps(args.gps, tz=config.timezone)
    stats = sampling_stats(result.tracks.values())
    print(
        f"{stats.total_points} points, {stats.total_tracks} tracks, "
        f"min interval {stats.min_interval_s} s"
    )
    print(
        f"exactly 1 min: {stats.fraction_exactly_1min:.4f}  "
        f"over 5 min: {stats.fraction_over_5min:.4f}"
    )
    print("histogram: " + " ".join(f"{k}:{v}" for k, v in stats.histogram.items()))
    if args.out:
        doc = {
            "config": config.as_dict(),
            "total_points": stats.total_points,
            "total_tracks": stats.total_tracks,
            "min_interval_s": stats.min_interval_s,
            "fraction_exactly_1min": stats.fraction_exactly_1min,
            "fraction_over_5min": stats.fraction_over_5min,
            "histogram": stats.histogram,
            "rejected_rows": len(result.rejects),
            "duplicates": result.duplicates,
        }
        write_text(Path(args.out), json.dumps(doc, ensure_ascii=False, separators=(",", ":")) + "\n")
    return 0


# --- helpers ------------------------------------------------------------------


def threshold_dict(config: RunConfig) -> dict:
    return {
        "interstate_m": config.interstate_m,
        "state_m": config.state_m,
        "local_m": config.local_m,
        "hint_m": config.hint_m,
    }


def load_index_checked(index_dir, config: RunConfig) -> TiledIndex:
    idx = read_index(index_dir)
    max_snap = config.thresholds().max_snap_m
    if max_snap > idx.buffer_m:
        raise FormatError(
            f"index buffer {idx.buffer_m} m is smaller than the configured "
            f"max snap threshold {max_snap} m; rebuild the index",
            file=str(index_dir),
        )
    return idx


def read_matched_dir(directory) -> dict[tuple[date, str], list[MatchedPoint]]:
    root = Path(directory)
    if not root.is_dir():
        raise FormatError("matched-track directory not found", file=str(root))
    matched: dict[tuple[date, str], list[MatchedPoint]] = {}
    for path in sorted(root.glob("*.json")):
        try:
            day, vehicle_id, points = parse_track_doc(json.loads(path.read_text(encoding="utf-8")))
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"malformed matched-track file: {exc}", file=str(path)) from exc
        matched[(day, vehicle_id)] = points
    return matched


def write_text(path: Path, data: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(data, encoding="utf-8")
    os.replace(tmp, path)


def write_report_csv(path: Path, config: RunConfig, header: list[str], rows: list[list[str]]) -> None:
    buf = io.StringIO()
    for line in config.header_lines():
        buf.write(line + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    write_text(path, buf.getvalue())


def write_report_json(path: Path, config: RunConfig, key: str, records: list[dict]) -> None:
    doc = {"config": config.as_dict(), key: records}
    write_text(path, json.dumps(doc, ensure_ascii=False, separators=(",", ":")) + "\n")


def write_rejects(path: Path, rejects: list[RejectedRow]) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["Row", "Reason"])
    for reject in rejects:
        writer.writerow([reject.row, reject.reason])
    write_text(path, buf.getvalue())


if __name__ == "__main__":
    sys.exit(main())
