import { readFileSync } from "node:fs";
import { join } from "node:path";

import { parseMatchedTrack, parseReportCsv, parseSegmentStore, parseVerificationDoc } from "../src/parse";
import type { MatchedTrack, VerificationDoc } from "../src/types";

const FIXTURES = join(__dirname, "fixtures");

export function loadTrack(name: string): MatchedTrack {
  return parseMatchedTrack(JSON.parse(readFileSync(join(FIXTURES, "matched", name), "utf-8")));
}

export function loadVerification(): VerificationDoc {
  return parseVerificationDoc(JSON.parse(readFileSync(join(FIXTURES, "verify.json"), "utf-8")));
}

export function loadVerifyCsv(): string[][] {
  return parseReportCsv(readFileSync(join(FIXTURES, "verify.csv"), "utf-8"));
}

export function loadSegmentStore() {
  return parseSegmentStore(JSON.parse(readFileSync(join(FIXTURES, "segments.json"), "utf-8")));
}
