import { describe, expect, it } from "vitest";

import { formatHours, tableRows } from "../src/segmentTable";
import { loadVerification, loadVerifyCsv } from "./fixtures";

const HEADER = [
  "WOId", "VehicleId", "Date", "RouteRef", "StartPost", "EndPost",
  "StartOffset", "EndOffset", "ReportedHrs", "ComputedHrs", "MatchRatio",
  "Status", "Warnings",
];

describe("segment table", () => {
  it("shows one row per verified segment for the selected vehicle and date", () => {
    const doc = loadVerification();
    const rows = tableRows(doc, "V2", "2021-01-15");
    expect(rows.length).toBe(2);
    expect(rows.map((r) => r.segmentName)).toEqual(["I-65 mi 12-18", "I-65 mi 10-12"]);
  });

  it("cell values are byte-equal to the engine's CSV report", () => {
    const doc = loadVerification();
    const csv = loadVerifyCsv();
    expect(csv[0]).toEqual(HEADER);
    const byKey = new Map(csv.slice(1).map((row) => [`${row[0]}`, row]));
    expect(byKey.size).toBe(doc.records.length);

    for (const vehicle of ["V1", "V2", "V9"]) {
      for (const row of tableRows(doc, vehicle, "2021-01-15")) {
        const record = doc.records[row.recordIndex];
        const csvRow = byKey.get(record.wo_id);
        expect(csvRow).toBeDefined();
        expect(row.computedHrs).toBe(csvRow![9]);
        expect(row.reportedHrs).toBe(csvRow![8]);
        expect(row.status).toBe(csvRow![11]);
        expect(row.warnings).toBe(csvRow![12]);
      }
    }
  });

  it("covers every record when unfiltered", () => {
    const doc = loadVerification();
    expect(tableRows(doc, null, null).length).toBe(doc.records.length);
  });

  it("formats hours like the engine reports", () => {
    expect(formatHours(1)).toBe("1.00");
    expect(formatHours(0)).toBe("0.00");
    expect(formatHours(1.005)).toBe((1.005).toFixed(2));
  });
});
