/** Interchange documents produced by the batch engine. */

export interface TrackPoint {
  t: string; // ISO timestamp with offset
  lat: number;
  lon: number;
  road: string | null; // matched segment id, null when off-road
  class: string | null;
  milepost: number | null;
  snap_m: number | null;
}

export interface MatchedTrack {
  day: string; // YYYY-MM-DD
  vehicle_id: string;
  points: TrackPoint[];
}

export interface VerificationRecord {
  wo_id: string;
  vehicle_id: string;
  date: string;
  route_ref: string;
  start_post: number | null;
  end_post: number | null;
  start_offset: number | null;
  end_offset: number | null;
  reported_hours: number;
  computed_hours: number;
  match_ratio: number | null;
  status: string;
  failure_reason: string;
  days_spread: number;
  warnings: string[];
}

export interface VerificationDoc {
  config: Record<string, unknown>;
  records: VerificationRecord[];
}

/** Entry of the shared segment-geometry store written next to the tiles. */
export interface SegmentEntry {
  id: string;
  route_ref: string;
  start_post: number | null;
  end_post: number | null;
  start_offset: number | null;
  end_offset: number | null;
  geometry: [number, number][]; // [lon, lat]
}
