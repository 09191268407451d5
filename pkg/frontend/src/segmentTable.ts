/** The per-segment summary table. Every displayed number comes verbatim from
 * the verification report; hours use the same two-decimal formatting as the
 * engine's CSV, so table cells compare byte-for-byte against report fields. */

import type { VerificationDoc, VerificationRecord } from "./types";

export interface SegmentRow {
  recordIndex: number;
  segmentName: string;
  computedHrs: string;
  reportedHrs: string;
  status: string;
  warnings: string;
}

export function formatHours(hours: number): string {
  return hours.toFixed(2);
}

export function segmentName(record: VerificationRecord): string {
  if (record.start_post !== null && record.end_post !== null) {
    return `${record.route_ref} mi ${record.start_post}-${record.end_post}`;
  }
  return record.route_ref || "(no route)";
}

export function tableRows(
  doc: VerificationDoc,
  vehicleId: string | null,
  date: string | null,
): SegmentRow[] {
  const rows: SegmentRow[] = [];
  doc.records.forEach((record, index) => {
    if (vehicleId !== null && record.vehicle_id !== vehicleId) return;
    if (date !== null && record.date !== date) return;
    rows.push({
      recordIndex: index,
      segmentName: segmentName(record),
      computedHrs: formatHours(record.computed_hours),
      reportedHrs: formatHours(record.reported_hours),
      status: record.status,
      warnings: record.warnings.join(" "),
    });
  });
  return rows;
}
