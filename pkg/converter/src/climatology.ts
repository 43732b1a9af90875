/**
 * Per-calendar-month climatology and anomaly computation.
 *
 * The climatology is accumulated as an offset from the first baseline
 * occurrence of each (month, cell): clim = ref + mean(v - ref). For a
 * field that already equals its climatology every deviation is exactly
 * zero, so the anomalies come out exactly zero rather than within an ulp.
 */

import { BaselineCoverageError } from "./errors.js";
import { YearMonth } from "./netcdf.js";

/** (12, nCells) per-month means over the baseline years, inclusive. */
export function monthlyClimatology(
  values: Float64Array,
  months: YearMonth[],
  nCells: number,
  baseline: [number, number],
): Float64Array {
  const [first, last] = baseline;
  if (last < first) throw new BaselineCoverageError("baseline years must be (first, last)");
  const years = months.map((m) => m.year);
  if (first < Math.min(...years) || last > Math.max(...years)) {
    throw new BaselineCoverageError(
      `baseline ${first}-${last} outside input coverage ${Math.min(...years)}-${Math.max(...years)}`,
    );
  }

  const clim = new Float64Array(12 * nCells);
  const ref = new Float64Array(12 * nCells).fill(NaN);
  const count = new Int32Array(12);
  for (let t = 0; t < months.length; t++) {
    const { year, month } = months[t];
    if (year < first || year > last) continue;
    const m = month - 1;
    if (count[m] === 0) ref.set(values.subarray(t * nCells, (t + 1) * nCells), m * nCells);
    for (let i = 0; i < nCells; i++) {
      clim[m * nCells + i] += values[t * nCells + i] - ref[m * nCells + i];
    }
    count[m] += 1;
  }
  for (let m = 0; m < 12; m++) {
    if (count[m] === 0) {
      throw new BaselineCoverageError(
        `baseline ${first}-${last} has no data for calendar month ${m + 1}`,
      );
    }
    for (let i = 0; i < nCells; i++) {
      clim[m * nCells + i] = ref[m * nCells + i] + clim[m * nCells + i] / count[m];
    }
  }
  return clim;
}

/** values minus the matching calendar month of the climatology. */
export function subtractClimatology(
  values: Float64Array,
  months: YearMonth[],
  clim: Float64Array,
  nCells: number,
): Float64Array {
  const out = new Float64Array(values.length);
  for (let t = 0; t < months.length; t++) {
    const m = months[t].month - 1;
    for (let i = 0; i < nCells; i++) {
      out[t * nCells + i] = values[t * nCells + i] - clim[m * nCells + i];
    }
  }
  return out;
}
