/** Viewer state and pure selectors. Rendering at a slider position depends
 * only on this state, never on scrub history. */

import type { MatchedTrack, SegmentEntry, VerificationDoc, VerificationRecord } from "./types";
import { secondsSinceMidnight } from "./parse";

export interface ViewState {
  tracks: Map<string, MatchedTrack>; // key: `${day}|${vehicle_id}`
  verification: VerificationDoc | null;
  segmentStore: Map<string, SegmentEntry>; // matched road id -> inventory entry
  createMode: boolean; // mirrors the "create work orders" checkbox
  selectedDate: string | null;
  selectedVehicle: string | null;
  sliderSeconds: number;
  selectedRecord: number | null; // index into verification.records; null = whole route
}

export function initialState(): ViewState {
  return {
    tracks: new Map(),
    verification: null,
    segmentStore: new Map(),
    createMode: false,
    selectedDate: null,
    selectedVehicle: null,
    sliderSeconds: 0,
    selectedRecord: null,
  };
}

export function trackKey(day: string, vehicleId: string): string {
  return `${day}|${vehicleId}`;
}

export function addTrack(state: ViewState, track: MatchedTrack): void {
  state.tracks.set(trackKey(track.day, track.vehicle_id), track);
  if (state.selectedDate === null) {
    state.selectedDate = track.day;
    state.selectedVehicle = track.vehicle_id;
    state.sliderSeconds = sliderRange(state)[1];
  }
}

export function availableDates(state: ViewState): string[] {
  return [...new Set([...state.tracks.values()].map((t) => t.day))].sort();
}

export function vehiclesForDate(state: ViewState, day: string | null): string[] {
  if (day === null) return [];
  return [...state.tracks.values()]
    .filter((t) => t.day === day)
    .map((t) => t.vehicle_id)
    .sort();
}

export function currentTrack(state: ViewState): MatchedTrack | null {
  if (state.selectedDate === null || state.selectedVehicle === null) return null;
  return state.tracks.get(trackKey(state.selectedDate, state.selectedVehicle)) ?? null;
}

/** Slider bounds in seconds since local midnight; [0, 0] without a track. */
export function sliderRange(state: ViewState): [number, number] {
  const track = currentTrack(state);
  if (!track || track.points.length === 0) return [0, 0];
  return [
    secondsSinceMidnight(track.points[0].t),
    secondsSinceMidnight(track.points[track.points.length - 1].t),
  ];
}

export function setSlider(state: ViewState, seconds: number): void {
  const [lo, hi] = sliderRange(state);
  state.sliderSeconds = Math.min(Math.max(seconds, lo), hi);
}

export function selectTrack(state: ViewState, day: string, vehicleId: string): void {
  state.selectedDate = day;
  state.selectedVehicle = vehicleId;
  state.selectedRecord = null;
  state.sliderSeconds = sliderRange(state)[1];
}

/** Validation is possible once a well-formed report is loaded. */
export function canValidate(state: ViewState): boolean {
  return state.verification !== null;
}

/** Date/vehicle drill-down is for verification; creation mode hides it. */
export function selectorsEnabled(state: ViewState): boolean {
  return !state.createMode;
}

export function selectedRecord(state: ViewState): VerificationRecord | null {
  if (state.verification === null || state.selectedRecord === null) return null;
  return state.verification.records[state.selectedRecord] ?? null;
}
