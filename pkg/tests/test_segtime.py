import random
from datetime import timedelta

import pytest

from plowtrack.geo import Coordinate
from plowtrack.inventory import MileMarker, build_index, road_name_to_type
from plowtrack.matching import MatchThresholds, MatchedPoint, match_track
from plowtrack.segtime import (
    EffectiveBounds,
    SegmentSpec,
    SegmentTimeFailure,
    compute_seconds,
    effective_bounds,
)
from plowtrack.tracks import GpsPoint

from conftest import DAY, day_track, route_with_markers, ts


def marker_set(posts, route_raw="I-65"):
    route = road_name_to_type(route_raw)
    return [MileMarker(route, p, Coordinate(40.0, -86.5 + p * 0.01)) for p in posts]


def spec(route_ref="I-65", start_post=None, end_post=None, start_offset=None, end_offset=None):
    return SegmentSpec(
        segment_id="seg-test",
        route_ref=route_ref,
        start_post=start_post,
        end_post=end_post,
        start_offset=start_offset,
        end_offset=end_offset,
    )


def synthetic_matched(points_spec, vehicle_id="V1", day=DAY, road="seg-i65"):
    """Matched points built directly: (seconds, milepost or None, road or None)."""
    out = []
    for seconds, milepost, road_id in points_spec:
        point = GpsPoint(vehicle_id, ts() + timedelta(seconds=seconds), Coordinate(40.0, -86.5))
        out.append(
            MatchedPoint(
                point=point,
                road=road_id,
                road_class=None,
                milepost=milepost,
                snap_distance_m=5.0 if road_id else None,
            )
        )
    return {(day, vehicle_id): out}


ROUTES = {"seg-i65": "I-65", "seg-sr26": "SR-26"}
MARKERS = {"I-65": marker_set(range(5, 30))}


class TestEffectiveBounds:
    def test_zero_offsets(self):
        bounds, failure = effective_bounds(spec(start_post=10, end_post=20), marker_set(range(5, 25)))
        assert failure is SegmentTimeFailure.NONE
        assert bounds == EffectiveBounds(10.0, 20.0)

    def test_offsets_shift_and_need_adjacent_markers(self):
        s = spec(start_post=10, end_post=20, start_offset=-0.3, end_offset=0.4)
        bounds, failure = effective_bounds(s, marker_set(range(9, 22)))
        assert failure is SegmentTimeFailure.NONE
        assert bounds.lower == pytest.approx(9.7)
        assert bounds.upper == pytest.approx(20.4)
        # preceding marker 9 required for the negative start offset
        _, failure = effective_bounds(s, marker_set(range(10, 22)))
        assert failure is SegmentTimeFailure.POST_NOT_FOUND
        # subsequent marker 21 required for the positive end offset
        _, failure = effective_bounds(s, marker_set(range(9, 21)))
        assert failure is SegmentTimeFailure.POST_NOT_FOUND

    def test_missing_base_posts(self):
        bounds, failure = effective_bounds(spec(start_post=10, end_post=20), marker_set(range(11, 20)))
        assert bounds is None
        assert failure is SegmentTimeFailure.POST_NOT_FOUND

    def test_empty_marker_list(self):
        _, failure = effective_bounds(spec(start_post=10, end_post=20), [])
        assert failure is SegmentTimeFailure.NO_MILE_MARKERS

    def test_positive_start_offset_needs_no_extra_marker(self):
        s = spec(start_post=10, end_post=20, start_offset=0.3, end_offset=-0.4)
        bounds, failure = effective_bounds(s, marker_set(range(10, 21)))
        assert failure is SegmentTimeFailure.NONE
        assert bounds.lower == pytest.approx(10.3)
        assert bounds.upper == pytest.approx(19.6)

    def test_inclusive_containment(self):
        bounds = EffectiveBounds(10.0, 20.0)
        assert bounds.contains(10.0)
        assert bounds.contains(20.0)
        assert not bounds.contains(9.999999)


class TestComputeSeconds:
    def test_three_points_one_minute_apart(self):
        matched = synthetic_matched([(0, 12.0, "seg-i65"), (60, 12.1, "seg-i65"), (120, 12.2, "seg-i65")])
        result = compute_seconds(spec(start_post=10, end_post=20), "V1", DAY, matched, MARKERS, ROUTES)
        assert result.computed_seconds == 120.0
        assert result.computed_hours == 120.0 / 3600.0
        assert result.points_used == 2
        assert result.failure_reason is SegmentTimeFailure.NONE
        assert result.first_time == ts()
        assert result.last_time == ts() + timedelta(seconds=120)

    def test_long_gap_capped_at_600(self):
        matched = synthetic_matched([(0, 12.0, "seg-i65"), (900, 12.1, "seg-i65")])
        result = compute_seconds(spec(start_post=10, end_post=20), "V1", DAY, matched, MARKERS, ROUTES)
        assert result.computed_seconds == 600.0

    def test_cap_is_configurable(self):
        matched = synthetic_matched([(0, 12.0, "seg-i65"), (900, 12.1, "seg-i65")])
        result = compute_seconds(
            spec(start_post=10, end_post=20), "V1", DAY, matched, MARKERS, ROUTES, cap_seconds=1200.0
        )
        assert result.computed_seconds == 900.0

    def test_missing_route_ref(self):
        matched = synthetic_matched([(0, 12.0, "seg-i65")])
        result = compute_seconds(spec(route_ref="  "), "V1", DAY, matched, MARKERS, ROUTES)
        assert result.failure_reason is SegmentTimeFailure.NO_ROUTE_REF
        assert result.computed_seconds == 0.0
        assert result.computed_hours == 0.0

    def test_no_track_for_day(self):
        matched = synthetic_matched([(0, 12.0, "seg-i65")])
        result = compute_seconds(
            spec(start_post=10, end_post=20), "V9", DAY, matched, MARKERS, ROUTES
        )
        assert result.failure_reason is SegmentTimeFailure.NO_TRACK

    def test_failure_precedence_route_before_track(self):
        result = compute_seconds(spec(route_ref=""), "V9", DAY, {}, MARKERS, ROUTES)
        assert result.failure_reason is SegmentTimeFailure.NO_ROUTE_REF

    def test_vehicle_never_on_road(self):
        matched = synthetic_matched([(0, 12.0, "seg-sr26"), (60, 12.1, "seg-sr26")])
        result = compute_seconds(spec(start_post=10, end_post=20), "V1", DAY, matched, MARKERS, ROUTES)
        assert result.failure_reason is SegmentTimeFailure.NONE
        assert result.computed_seconds == 0.0
        assert result.points_used == 0

    def test_points_outside_bounds_skipped(self):
        matched = synthetic_matched([
            (0, 9.9, "seg-i65"),     # below
            (60, 10.0, "seg-i65"),   # inclusive lower edge
            (120, 20.0, "seg-i65"),  # inclusive upper edge
            (180, 20.1, "seg-i65"),  # above
        ])
        result = compute_seconds(spec(start_post=10, end_post=20), "V1", DAY, matched, MARKERS, ROUTES)
        assert result.points_used == 2
        assert result.computed_seconds == 120.0

    def test_milepost_none_skipped_when_bounds_apply(self):
        matched = synthetic_matched([(0, None, "seg-i65"), (60, 12.0, "seg-i65"), (120, 12.1, "seg-i65")])
        bounded = compute_seconds(spec(start_post=10, end_post=20), "V1", DAY, matched, MARKERS, ROUTES)
        assert bounded.points_used == 1
        unbounded = compute_seconds(spec(), "V1", DAY, matched, MARKERS, ROUTES)
        assert unbounded.points_used == 2  # whole road counts without posts

    def test_off_road_points_skipped(self):
        matched = synthetic_matched([(0, None, None), (60, 12.0, "seg-i65"), (120, 12.1, "seg-i65")])
        result = compute_seconds(spec(start_post=10, end_post=20), "V1", DAY, matched, MARKERS, ROUTES)
        assert result.points_used == 1
        assert result.computed_seconds == 60.0

    def test_last_point_contributes_nothing(self):
        matched = synthetic_matched([(0, 12.0, "seg-i65")])
        result = compute_seconds(spec(start_post=10, end_post=20), "V1", DAY, matched, MARKERS, ROUTES)
        assert result.computed_seconds == 0.0
        assert result.points_used == 0
        assert result.first_time == ts()

    def test_successor_is_next_in_full_track_not_next_qualifying(self):
        # Qualifying point followed by an off-segment point: the gap to that
        # off-segment successor is what counts.
        matched = synthetic_matched([(0, 12.0, "seg-i65"), (45, 25.0, "seg-i65"), (1000, 12.1, "seg-i65")])
        result = compute_seconds(spec(start_post=10, end_post=20), "V1", DAY, matched, MARKERS, ROUTES)
        assert result.computed_seconds == 45.0

    def test_cap_invariant(self):
        rng = random.Random(31)
        for _ in range(20):
            n = rng.randint(1, 30)
            t = 0
            rows = []
            for _ in range(n):
                rows.append((t, rng.uniform(8.0, 22.0), "seg-i65"))
                t += rng.randint(10, 2000)
            matched = synthetic_matched(rows)
            result = compute_seconds(spec(start_post=10, end_post=20), "V1", DAY, matched, MARKERS, ROUTES)
            assert result.computed_seconds <= 600.0 * result.points_used
            assert result.computed_seconds <= 86_400.0

    def test_widening_bounds_never_decreases(self):
        rng = random.Random(53)
        rows = []
        t = 0
        for _ in range(40):
            rows.append((t, rng.uniform(5.0, 29.0), "seg-i65"))
            t += rng.randint(30, 700)
        matched = synthetic_matched(rows)
        previous = -1.0
        for width in range(1, 12):
            lo = 17 - width
            hi = 17 + width
            result = compute_seconds(spec(start_post=lo, end_post=hi), "V1", DAY, matched, MARKERS, ROUTES)
            assert result.failure_reason is SegmentTimeFailure.NONE
            assert result.computed_seconds >= previous
            previous = result.computed_seconds

    def test_brute_force_equivalence(self):
        rng = random.Random(97)
        for _ in range(30):
            n = rng.randint(0, 50)
            rows = []
            t = 0
            for _ in range(n):
                road = rng.choice(["seg-i65", "seg-sr26", None])
                milepost = rng.uniform(5.0, 29.0) if road else None
                rows.append((t, milepost, road))
                t += rng.randint(10, 900)
            matched = synthetic_matched(rows)
            s = spec(start_post=10, end_post=20)
            result = compute_seconds(s, "V1", DAY, matched, MARKERS, ROUTES)

            # Straightforward re-implementation: filter, then sum capped gaps.
            track = matched.get((DAY, "V1"), [])
            expected = 0.0
            for i, mp in enumerate(track):
                ok = (
                    mp.road is not None
                    and ROUTES.get(mp.road) == "I-65"
                    and mp.milepost is not None
                    and 10.0 <= mp.milepost <= 20.0
                    and i + 1 < len(track)
                )
                if ok:
                    gap = (track[i + 1].point.time - mp.point.time).total_seconds()
                    expected += min(gap, 600.0)
            if n == 0:
                assert result.failure_reason is SegmentTimeFailure.NO_TRACK
            else:
                assert result.computed_seconds == expected


class TestWholeRoadConsistency:
    def test_whole_road_equals_sum_of_mile_segments(self):
        from plowtrack.inventory import synthesize_mile_segments

        segments, markers = route_with_markers(first_post=10, n_markers=11)
        idx = build_index(segments, markers)
        line = segments[0].geometry
        rng = random.Random(7)
        rows = []
        t = 0
        for _ in range(60):
            f = rng.uniform(0.02, 0.98)
            rows.append((t, float(line.lats[0]), float(line.lons[0] + (line.lons[1] - line.lons[0]) * f)))
            t += rng.choice([60, 120, 300, 900])
        matched_points = match_track(idx, day_track(rows), MatchThresholds())
        assert all(mp.milepost is not None for mp in matched_points)
        assert not any(abs(mp.milepost - round(mp.milepost)) < 1e-9 for mp in matched_points)
        matched = {(DAY, "V1"): matched_points}

        whole = compute_seconds(
            SegmentSpec(segment_id="whole", route_ref="I-65"),
            "V1", DAY, matched, idx.mile_markers, idx.segment_routes(),
        )
        mile_segments = synthesize_mile_segments(idx, segments[0].route)
        total = 0.0
        for seg in mile_segments:
            part = compute_seconds(
                SegmentSpec.from_road_segment(seg), "V1", DAY, matched,
                idx.mile_markers, idx.segment_routes(),
            )
            assert part.failure_reason is SegmentTimeFailure.NONE
            total += part.computed_seconds
        assert total == whole.computed_seconds
