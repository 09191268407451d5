/** DOM wiring: upload boxes, selectors, slider, table, map. All data stays in
 * the browser; nothing is uploaded anywhere. */

import { MapView, noTiles, osmTiles } from "./mapView";
import {
  SchemaError,
  parseMatchedTrack,
  parseSegmentStore,
  parseVerificationDoc,
} from "./parse";
import { verificationCsv } from "./reportCsv";
import { tableRows } from "./segmentTable";
import {
  ViewState,
  addTrack,
  availableDates,
  canValidate,
  currentTrack,
  initialState,
  selectTrack,
  selectedRecord,
  selectorsEnabled,
  setSlider,
  sliderRange,
  vehiclesForDate,
} from "./state";
import { filterForRecord, renderTrack } from "./trackRender";

const state: ViewState = initialState();
let validated = false;

const el = <T extends HTMLElement>(id: string): T => {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
};

const canvas = el<HTMLCanvasElement>("map");
const useBasemap = new URLSearchParams(location.search).get("basemap") !== "off";
const map = new MapView(canvas, useBasemap ? osmTiles : noTiles);

function banner(message: string): void {
  const box = el<HTMLDivElement>("banner");
  const item = document.createElement("div");
  item.className = "banner-item";
  item.textContent = message;
  const close = document.createElement("button");
  close.textContent = "x";
  close.onclick = () => item.remove();
  item.appendChild(close);
  box.appendChild(item);
}

async function readFiles(files: FileList | null, handler: (name: string, text: string) => void) {
  if (!files) return;
  for (const file of Array.from(files)) {
    try {
      handler(file.name, await file.text());
    } catch (err) {
      banner(err instanceof SchemaError ? `${file.name}: ${err.message}` : `${file.name}: unreadable file`);
    }
  }
  refresh();
}

function handleTrackFile(_name: string, text: string): void {
  const doc = JSON.parse(text);
  if (doc && typeof doc === "object" && "segments" in doc && !("points" in doc)) {
    // segments.json from the index directory: enables per-segment isolation.
    for (const [k, v] of parseSegmentStore(doc)) state.segmentStore.set(k, v);
    return;
  }
  addTrack(state, parseMatchedTrack(doc));
}

function handleReportFile(_name: string, text: string): void {
  state.verification = parseVerificationDoc(JSON.parse(text));
  validated = false;
}

function wireDropBox(boxId: string, inputId: string, handler: (name: string, text: string) => void) {
  const box = el<HTMLDivElement>(boxId);
  const input = el<HTMLInputElement>(inputId);
  box.addEventListener("click", () => input.click());
  box.addEventListener("dragover", (e) => {
    e.preventDefault();
    box.classList.add("hover");
  });
  box.addEventListener("dragleave", () => box.classList.remove("hover"));
  box.addEventListener("drop", (e) => {
    e.preventDefault();
    box.classList.remove("hover");
    void readFiles(e.dataTransfer?.files ?? null, handler);
  });
  input.addEventListener("change", () => void readFiles(input.files, handler));
}

function refresh(): void {
  const dateSelect = el<HTMLSelectElement>("date-select");
  const vehicleSelect = el<HTMLSelectElement>("vehicle-select");
  const slider = el<HTMLInputElement>("time-slider");
  const validate = el<HTMLButtonElement>("validate");
  const download = el<HTMLButtonElement>("download");
  const createMode = el<HTMLInputElement>("create-mode");

  state.createMode = createMode.checked;
  const enabled = selectorsEnabled(state);
  dateSelect.disabled = !enabled;
  vehicleSelect.disabled = !enabled;

  fillSelect(dateSelect, availableDates(state), state.selectedDate);
  fillSelect(vehicleSelect, vehiclesForDate(state, state.selectedDate), state.selectedVehicle);

  const [lo, hi] = sliderRange(state);
  slider.min = String(lo);
  slider.max = String(hi);
  slider.value = String(state.sliderSeconds);
  el<HTMLSpanElement>("slider-label").textContent = clock(state.sliderSeconds);

  validate.disabled = !canValidate(state);
  download.disabled = !validated;

  renderTable();
  paint();
}

function fillSelect(select: HTMLSelectElement, values: string[], selected: string | null): void {
  select.innerHTML = "";
  for (const value of values) {
    const option = document.createElement("option");
    option.value = value;
    option.textContent = value;
    option.selected = value === selected;
    select.appendChild(option);
  }
}

function clock(seconds: number): string {
  const hh = String(Math.floor(seconds / 3600)).padStart(2, "0");
  const mm = String(Math.floor((seconds % 3600) / 60)).padStart(2, "0");
  return `${hh}:${mm}`;
}

function renderTable(): void {
  const body = el<HTMLTableSectionElement>("segment-rows");
  body.innerHTML = "";
  if (!validated || !state.verification) return;
  const rows = tableRows(state.verification, state.selectedVehicle, state.selectedDate);
  for (const row of rows) {
    const tr = document.createElement("tr");
    const radio = document.createElement("input");
    radio.type = "radio";
    radio.name = "segment";
    radio.checked = state.selectedRecord === row.recordIndex;
    radio.onclick = () => {
      state.selectedRecord = state.selectedRecord === row.recordIndex ? null : row.recordIndex;
      refresh();
    };
    const cells = [row.segmentName, row.computedHrs, row.reportedHrs];
    for (const text of cells) {
      const td = document.createElement("td");
      td.textContent = text;
      tr.appendChild(td);
    }
    const status = document.createElement("td");
    status.textContent = row.warnings ? `${row.status} (${row.warnings})` : row.status;
    status.className = `status-${row.status.toLowerCase()}`;
    tr.appendChild(status);
    const radioCell = document.createElement("td");
    radioCell.appendChild(radio);
    tr.appendChild(radioCell);
    body.appendChild(tr);
  }
}

function paint(): void {
  const track = currentTrack(state);
  if (!track) {
    map.draw({ segments: [], marker: null, visiblePoints: 0 });
    return;
  }
  map.fitTo(track.points.map((p) => p.lon), track.points.map((p) => p.lat));
  const record = selectedRecord(state);
  const filter = record ? filterForRecord(record) : null;
  map.draw(renderTrack(track, state.sliderSeconds, filter, state.segmentStore));
}

function init(): void {
  wireDropBox("gps-box", "gps-input", handleTrackFile);
  wireDropBox("wo-box", "wo-input", handleReportFile);

  el<HTMLSelectElement>("date-select").addEventListener("change", (e) => {
    const day = (e.target as HTMLSelectElement).value;
    const vehicles = vehiclesForDate(state, day);
    selectTrack(state, day, vehicles[0] ?? "");
    refresh();
  });
  el<HTMLSelectElement>("vehicle-select").addEventListener("change", (e) => {
    if (state.selectedDate) {
      selectTrack(state, state.selectedDate, (e.target as HTMLSelectElement).value);
      refresh();
    }
  });
  el<HTMLInputElement>("time-slider").addEventListener("input", (e) => {
    setSlider(state, Number((e.target as HTMLInputElement).value));
    el<HTMLSpanElement>("slider-label").textContent = clock(state.sliderSeconds);
    paint();
  });
  el<HTMLInputElement>("create-mode").addEventListener("change", refresh);
  el<HTMLButtonElement>("validate").addEventListener("click", () => {
    validated = true;
    refresh();
  });
  el<HTMLButtonElement>("download").addEventListener("click", () => {
    if (!state.verification) return;
    const blob = new Blob([verificationCsv(state.verification)], { type: "text/csv" });
    const a = document.createElement("a");
    a.href = URL.createObjectURL(blob);
    a.download = "verification-report.csv";
    a.click();
    URL.revokeObjectURL(a.href);
  });
  refresh();
}

init();
