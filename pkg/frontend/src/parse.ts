/** Validation of uploaded files. Schema problems raise SchemaError with a
 * row-level diagnostic so the UI can show a useful banner instead of crashing. */

import type { MatchedTrack, SegmentEntry, TrackPoint, VerificationDoc, VerificationRecord } from "./types";

export class SchemaError extends Error {
  constructor(message: string, readonly detail?: string) {
    super(detail ? `${message} (${detail})` : message);
    this.name = "SchemaError";
  }
}

function isRecord(value: unknown): value is Record<string, unknown> {
  return typeof value === "object" && value !== null && !Array.isArray(value);
}

function numberOrNull(value: unknown, what: string): number | null {
  if (value === null) return null;
  if (typeof value === "number" && Number.isFinite(value)) return value;
  throw new SchemaError(`${what} must be a number or null`, JSON.stringify(value));
}

function requireNumber(value: unknown, what: string): number {
  if (typeof value === "number" && Number.isFinite(value)) return value;
  throw new SchemaError(`${what} must be a number`, JSON.stringify(value));
}

function requireString(value: unknown, what: string): string {
  if (typeof value === "string") return value;
  throw new SchemaError(`${what} must be a string`, JSON.stringify(value));
}

export function parseMatchedTrack(raw: unknown): MatchedTrack {
  if (!isRecord(raw)) throw new SchemaError("matched track must be a JSON object");
  const day = requireString(raw.day, "day");
  if (!/^\d{4}-\d{2}-\d{2}$/.test(day)) throw new SchemaError("day must be YYYY-MM-DD", day);
  const vehicle = requireString(raw.vehicle_id, "vehicle_id");
  if (!Array.isArray(raw.points)) throw new SchemaError("points must be an array");
  const points: TrackPoint[] = raw.points.map((entry, i) => {
    if (!isRecord(entry)) throw new SchemaError("bad point row", `row ${i}`);
    try {
      const road = entry.road === null ? null : requireString(entry.road, "road");
      return {
        t: requireString(entry.t, "t"),
        lat: requireNumber(entry.lat, "lat"),
        lon: requireNumber(entry.lon, "lon"),
        road,
        class: entry.class === null ? null : requireString(entry.class, "class"),
        milepost: numberOrNull(entry.milepost, "milepost"),
        snap_m: numberOrNull(entry.snap_m, "snap_m"),
      };
    } catch (err) {
      if (err instanceof SchemaError) throw new SchemaError(err.message, `point row ${i}`);
      throw err;
    }
  });
  return { day, vehicle_id: vehicle, points };
}

export function parseVerificationDoc(raw: unknown): VerificationDoc {
  if (!isRecord(raw)) throw new SchemaError("verification report must be a JSON object");
  if (!isRecord(raw.config)) throw new SchemaError("missing config object");
  if (!Array.isArray(raw.records)) throw new SchemaError("missing records array");
  const records: VerificationRecord[] = raw.records.map((entry, i) => {
    if (!isRecord(entry)) throw new SchemaError("bad record", `record ${i}`);
    try {
      return {
        wo_id: requireString(entry.wo_id, "wo_id"),
        vehicle_id: requireString(entry.vehicle_id, "vehicle_id"),
        date: requireString(entry.date, "date"),
        route_ref: requireString(entry.route_ref, "route_ref"),
        start_post: numberOrNull(entry.start_post, "start_post"),
        end_post: numberOrNull(entry.end_post, "end_post"),
        start_offset: numberOrNull(entry.start_offset, "start_offset"),
        end_offset: numberOrNull(entry.end_offset, "end_offset"),
        reported_hours: requireNumber(entry.reported_hours, "reported_hours"),
        computed_hours: requireNumber(entry.computed_hours, "computed_hours"),
        match_ratio: numberOrNull(entry.match_ratio, "match_ratio"),
        status: requireString(entry.status, "status"),
        failure_reason: requireString(entry.failure_reason, "failure_reason"),
        days_spread: requireNumber(entry.days_spread, "days_spread"),
        warnings: Array.isArray(entry.warnings) ? entry.warnings.map(String) : [],
      };
    } catch (err) {
      if (err instanceof SchemaError) throw new SchemaError(err.message, `record ${i}`);
      throw err;
    }
  });
  return { config: raw.config, records };
}

/** segments.json from the tile store: used to map matched road ids to routes. */
export function parseSegmentStore(raw: unknown): Map<string, SegmentEntry> {
  if (!isRecord(raw) || !Array.isArray(raw.segments)) {
    throw new SchemaError("segment store must contain a segments array");
  }
  const out = new Map<string, SegmentEntry>();
  raw.segments.forEach((entry, i) => {
    if (!isRecord(entry)) throw new SchemaError("bad segment entry", `entry ${i}`);
    const id = requireString(entry.id, "id");
    out.set(id, {
      id,
      route_ref: requireString(entry.route_ref, "route_ref"),
      start_post: numberOrNull(entry.start_post, "start_post"),
      end_post: numberOrNull(entry.end_post, "end_post"),
      start_offset: numberOrNull(entry.start_offset, "start_offset"),
      end_offset: numberOrNull(entry.end_offset, "end_offset"),
      geometry: (entry.geometry as [number, number][]) ?? [],
    });
  });
  return out;
}

/** Minimal CSV reader for the engine's reports: '#' header comments, quoted
 * fields, comma delimiter. Returns [header, ...rows]. */
export function parseReportCsv(text: string): string[][] {
  const rows: string[][] = [];
  for (const line of text.split(/\r?\n/)) {
    if (!line || line.startsWith("#")) continue;
    rows.push(splitCsvLine(line));
  }
  return rows;
}

function splitCsvLine(line: string): string[] {
  const out: string[] = [];
  let field = "";
  let quoted = false;
  for (let i = 0; i < line.length; i++) {
    const c = line[i];
    if (quoted) {
      if (c === '"') {
        if (line[i + 1] === '"') {
          field += '"';
          i++;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c === '"') {
      quoted = true;
    } else if (c === ",") {
      out.push(field);
      field = "";
    } else {
      field += c;
    }
  }
  out.push(field);
  return out;
}

/** Wall-clock seconds since local midnight, straight from the ISO string. */
export function secondsSinceMidnight(isoTimestamp: string): number {
  const m = /T(\d{2}):(\d{2}):(\d{2})/.exec(isoTimestamp);
  if (!m) throw new SchemaError("bad timestamp", isoTimestamp);
  return Number(m[1]) * 3600 + Number(m[2]) * 60 + Number(m[3]);
}
