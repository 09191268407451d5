/** Render model for the animated track: which line pieces to draw at a given
 * slider position and in which color. Pure data out; the canvas painter and
 * the tests both consume it. */

import { secondsSinceMidnight } from "./parse";
import { routeKey } from "./routes";
import type { MatchedTrack, SegmentEntry, TrackPoint, VerificationRecord } from "./types";

export interface RenderSegment {
  from: [number, number]; // [lon, lat]
  to: [number, number];
  color: string;
}

export interface TrackRender {
  segments: RenderSegment[];
  marker: [number, number] | null; // the synthetic "current location"
  visiblePoints: number;
}

/** Color ramp relative to the slider: the oldest drawn point is pure red and
 * the most recently traversed is pure blue, so repeated passes over the same
 * road stay distinguishable while scrubbing. */
export function timeColor(t: number, t0: number, tSlider: number): string {
  const span = tSlider - t0;
  const frac = span > 0 ? Math.min(Math.max((t - t0) / span, 0), 1) : 1;
  const red = Math.round(255 * (1 - frac));
  const blue = Math.round(255 * frac);
  return `rgb(${red},0,${blue})`;
}

export interface SegmentFilter {
  routeKey: string;
  lower: number | null;
  upper: number | null;
}

/** Filter for the "selected track" radio: points on the record's route and,
 * when it has posts, inside its effective milepost bounds. */
export function filterForRecord(record: VerificationRecord): SegmentFilter {
  let lower: number | null = null;
  let upper: number | null = null;
  if (record.start_post !== null && record.end_post !== null) {
    lower = record.start_post + (record.start_offset ?? 0);
    upper = record.end_post + (record.end_offset ?? 0);
  }
  return { routeKey: routeKey(record.route_ref), lower, upper };
}

function pointPasses(
  p: TrackPoint,
  filter: SegmentFilter | null,
  segmentStore: Map<string, SegmentEntry>,
): boolean {
  if (filter === null) return true;
  if (p.road === null) return false;
  const entry = segmentStore.get(p.road);
  if (!entry || routeKey(entry.route_ref) !== filter.routeKey) return false;
  if (filter.lower !== null && filter.upper !== null) {
    if (p.milepost === null) return false;
    if (p.milepost < filter.lower || p.milepost > filter.upper) return false;
  }
  return true;
}

export function renderTrack(
  track: MatchedTrack,
  sliderSeconds: number,
  filter: SegmentFilter | null = null,
  segmentStore: Map<string, SegmentEntry> = new Map(),
): TrackRender {
  const points = track.points;
  if (points.length === 0) return { segments: [], marker: null, visiblePoints: 0 };
  const t0 = secondsSinceMidnight(points[0].t);

  const segments: RenderSegment[] = [];
  let marker: [number, number] | null = null;
  let visible = 0;
  let previous: { p: TrackPoint; index: number } | null = null;
  for (let i = 0; i < points.length; i++) {
    const p = points[i];
    const t = secondsSinceMidnight(p.t);
    if (t > sliderSeconds) break;
    if (!pointPasses(p, filter, segmentStore)) {
      previous = null;
      continue;
    }
    visible++;
    marker = [p.lon, p.lat];
    // Only join samples that are consecutive in the raw track; a gap in the
    // filter must not draw a straight line across off-segment travel.
    if (previous !== null && previous.index === i - 1) {
      segments.push({
        from: [previous.p.lon, previous.p.lat],
        to: [p.lon, p.lat],
        color: timeColor(t, t0, sliderSeconds),
      });
    }
    previous = { p, index: i };
  }
  return { segments, marker, visiblePoints: visible };
}
