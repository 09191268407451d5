/** Re-emit a loaded verification report as CSV for download, using the same
 * column order and number formatting as the engine's reports. */

import type { VerificationDoc, VerificationRecord } from "./types";
import { formatHours } from "./segmentTable";

export const VERIFY_HEADER = [
  "WOId", "VehicleId", "Date", "RouteRef", "StartPost", "EndPost",
  "StartOffset", "EndOffset", "ReportedHrs", "ComputedHrs", "MatchRatio",
  "Status", "Warnings",
];

function csvField(value: string): string {
  if (/[",\n]/.test(value)) {
    return `"${value.replace(/"/g, '""')}"`;
  }
  return value;
}

function opt(value: number | null): string {
  return value === null ? "" : String(value);
}

export function recordRow(record: VerificationRecord): string[] {
  return [
    record.wo_id,
    record.vehicle_id,
    record.date,
    record.route_ref,
    opt(record.start_post),
    opt(record.end_post),
    opt(record.start_offset),
    opt(record.end_offset),
    formatHours(record.reported_hours),
    formatHours(record.computed_hours),
    record.match_ratio === null ? "" : record.match_ratio.toFixed(4),
    record.status,
    record.warnings.join(" "),
  ];
}

export function verificationCsv(doc: VerificationDoc): string {
  const lines: string[] = [];
  for (const [key, value] of Object.entries(doc.config)) {
    lines.push(`# ${key} = ${String(value)}`);
  }
  lines.push(VERIFY_HEADER.join(","));
  for (const record of doc.records) {
    lines.push(recordRow(record).map(csvField).join(","));
  }
  return lines.join("\n") + "\n";
}
