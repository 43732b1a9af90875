/**
 * NetCDF reading: extracts a monthly SST field with CF-style coordinates
 * into a dense (time, lat, lon) array with NaN for missing cells.
 */

import { NetCDFReader } from "netcdfjs";
import {
  CalendarGapError,
  FormatError,
  MissingVariableError,
  NonMonthlyDataError,
} from "./errors.js";

export interface YearMonth {
  year: number;
  month: number; // 1..12
}

export interface MonthlyField {
  lats: Float64Array; // band centers, ascending
  lons: Float64Array; // band centers in [0, 360), ascending
  months: YearMonth[]; // consecutive calendar months
  values: Float64Array; // (time, lat, lon) row-major, NaN = missing
}

export function monthIndex(ym: YearMonth): number {
  return ym.year * 12 + (ym.month - 1);
}

export function fromMonthIndex(idx: number): YearMonth {
  return { year: Math.floor(idx / 12), month: ((idx % 12) + 12) % 12 + 1 };
}

function asNumbers(values: unknown, what: string): Float64Array {
  if (!Array.isArray(values)) throw new FormatError(`${what}: expected a numeric array`);
  const flat = values.flat(Infinity) as unknown[];
  const out = new Float64Array(flat.length);
  for (let i = 0; i < flat.length; i++) {
    const v = Number(flat[i]);
    out[i] = v;
  }
  return out;
}

function coordName(reader: NetCDFReader, candidates: string[]): string {
  for (const name of candidates) {
    if (reader.dataVariableExists(name)) return name;
  }
  throw new MissingVariableError(`no coordinate variable among ${candidates.join(", ")}`);
}

function attrValue(attrs: { name: string; value: unknown }[], name: string): unknown {
  const hit = attrs.find((a) => a.name === name);
  return hit?.value;
}

/** Convert CF time values ("days/hours/months since <epoch>") to calendar months. */
export function parseTimeAxis(values: Float64Array, units: string): YearMonth[] {
  const match = /^(days|hours|months)\s+since\s+(\d{1,4})-(\d{1,2})(?:-(\d{1,2}))?/.exec(
    units.trim(),
  );
  if (!match) throw new NonMonthlyDataError(`unsupported time units: "${units}"`);
  const [, unit, ys, ms, ds] = match;
  const epochYear = Number(ys);
  const epochMonth = Number(ms);
  const epochDay = Number(ds ?? "1");

  const out: YearMonth[] = [];
  for (const v of values) {
    if (unit === "months") {
      const idx = epochYear * 12 + (epochMonth - 1) + Math.round(v);
      out.push(fromMonthIndex(idx));
    } else {
      const days = unit === "hours" ? v / 24 : v;
      const ms0 = Date.UTC(epochYear, epochMonth - 1, epochDay);
      const d = new Date(ms0 + days * 86400_000);
      out.push({ year: d.getUTCFullYear(), month: d.getUTCMonth() + 1 });
    }
  }
  return out;
}

/** Require strictly consecutive calendar months; report the first break. */
export function checkMonthly(months: YearMonth[]): void {
  for (let t = 1; t < months.length; t++) {
    const step = monthIndex(months[t]) - monthIndex(months[t - 1]);
    if (step === 1) continue;
    const a = `${months[t - 1].year}-${String(months[t - 1].month).padStart(2, "0")}`;
    const b = `${months[t].year}-${String(months[t].month).padStart(2, "0")}`;
    if (step > 1) {
      throw new CalendarGapError(`calendar gap of ${step - 1} month(s) between ${a} and ${b}`);
    }
    throw new NonMonthlyDataError(`time axis is not monthly: ${a} followed by ${b}`);
  }
}

/** Read one variable as a monthly (time, lat, lon) field. */
export function readMonthlyField(data: Buffer | ArrayBuffer, variable: string): MonthlyField {
  const reader = new NetCDFReader(data);
  const hit = reader.variables.find((v) => v.name === variable);
  if (!hit) {
    const names = reader.variables.map((v) => v.name).join(", ");
    throw new MissingVariableError(`variable ${variable} not found (file has: ${names})`);
  }

  const latName = coordName(reader, ["lat", "latitude"]);
  const lonName = coordName(reader, ["lon", "longitude"]);
  const timeName = coordName(reader, ["time"]);

  const dimNames = hit.dimensions.map((id: number) => reader.dimensions[id].name);
  const expected = [timeName, latName, lonName];
  if (dimNames.length !== 3 || expected.some((n, i) => dimNames[i] !== n)) {
    throw new FormatError(
      `variable ${variable} must be (${expected.join(", ")}), found (${dimNames.join(", ")})`,
    );
  }

  let lats = asNumbers(reader.getDataVariable(latName), latName);
  let lons = asNumbers(reader.getDataVariable(lonName), lonName);
  const timeVar = reader.variables.find((v) => v.name === timeName)!;
  const units = attrValue(timeVar.attributes, "units");
  if (typeof units !== "string") {
    throw new NonMonthlyDataError(`time variable has no units attribute`);
  }
  const months = parseTimeAxis(asNumbers(reader.getDataVariable(timeName), timeName), units);
  checkMonthly(months);

  let values = asNumbers(reader.getDataVariable(variable), variable);
  const nT = months.length;
  if (values.length !== nT * lats.length * lons.length) {
    throw new FormatError(
      `variable ${variable}: ${values.length} values for shape (${nT}, ${lats.length}, ${lons.length})`,
    );
  }

  // Fill values become NaN before any averaging.
  for (const attr of ["_FillValue", "missing_value"]) {
    const fill = attrValue(hit.attributes, attr);
    if (typeof fill === "number") {
      for (let i = 0; i < values.length; i++) {
        if (values[i] === fill) values[i] = NaN;
      }
    }
  }

  // Ascending latitudes; archives sometimes store north-to-south.
  if (lats.length > 1 && lats[0] > lats[lats.length - 1]) {
    lats = lats.slice().reverse();
    values = flipLat(values, nT, lats.length, lons.length);
  }

  // Longitudes in [0, 360), rotated to ascending order.
  const wrapped = Array.from(lons, (x) => ((x % 360) + 360) % 360);
  const order = wrapped.map((_, i) => i).sort((a, b) => wrapped[a] - wrapped[b]);
  if (order.some((src, dst) => src !== dst)) {
    values = permuteLon(values, nT, lats.length, lons.length, order);
  }
  lons = Float64Array.from(order, (i) => wrapped[i]);

  return { lats, lons, months, values };
}

function flipLat(values: Float64Array, nT: number, nLat: number, nLon: number): Float64Array {
  const out = new Float64Array(values.length);
  for (let t = 0; t < nT; t++) {
    for (let i = 0; i < nLat; i++) {
      const src = (t * nLat + (nLat - 1 - i)) * nLon;
      out.set(values.subarray(src, src + nLon), (t * nLat + i) * nLon);
    }
  }
  return out;
}

function permuteLon(
  values: Float64Array,
  nT: number,
  nLat: number,
  nLon: number,
  order: number[],
): Float64Array {
  const out = new Float64Array(values.length);
  for (let t = 0; t < nT; t++) {
    for (let i = 0; i < nLat; i++) {
      const row = (t * nLat + i) * nLon;
      for (let j = 0; j < nLon; j++) out[row + j] = values[row + order[j]];
    }
  }
  return out;
}
