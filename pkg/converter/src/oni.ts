/**
 * ONI targets: unweighted mean of the anomaly over grid cells whose band
 * centers fall in 5S-5N, 190E-240E, smoothed with a centered 3-month
 * running mean (2-month means at the series endpoints). Matches the
 * index definition used by the training engine.
 */

import { TargetGrid, latCenters, lonCenters, nLon } from "./grid.js";
import { MissingCellsError } from "./errors.js";

const BOX_LAT: [number, number] = [-5, 5];
const BOX_LON: [number, number] = [190, 240];

/** Lat-major node indices inside the index box. */
export function boxNodeIndices(grid: TargetGrid): number[] {
  const lats = latCenters(grid);
  const lons = lonCenters(grid);
  const out: number[] = [];
  for (let i = 0; i < lats.length; i++) {
    if (lats[i] < BOX_LAT[0] || lats[i] > BOX_LAT[1]) continue;
    for (let j = 0; j < lons.length; j++) {
      if (lons[j] < BOX_LON[0] || lons[j] > BOX_LON[1]) continue;
      out.push(i * nLon(grid) + j);
    }
  }
  if (out.length === 0) {
    throw new MissingCellsError("grid has no band centers inside the index box");
  }
  return out;
}

function runningMean3(series: Float64Array): Float64Array {
  const n = series.length;
  const out = new Float64Array(n);
  for (let t = 1; t + 1 < n; t++) out[t] = (series[t - 1] + series[t] + series[t + 1]) / 3;
  out[0] = (series[0] + series[1]) / 2;
  out[n - 1] = (series[n - 2] + series[n - 1]) / 2;
  return out;
}

/** Monthly index from a (time, node) anomaly array on the target grid. */
export function computeOni(anomalies: Float64Array, grid: TargetGrid, nT: number): Float64Array {
  if (nT < 3) throw new MissingCellsError("need at least 3 months to smooth the index");
  const nodes = anomalies.length / nT;
  const box = boxNodeIndices(grid);
  const means = new Float64Array(nT);
  for (let t = 0; t < nT; t++) {
    let sum = 0;
    for (const idx of box) {
      const v = anomalies[t * nodes + idx];
      if (Number.isNaN(v)) {
        throw new MissingCellsError(`index box cell ${idx} is missing at time step ${t}`);
      }
      sum += v;
    }
    means[t] = sum / box.length;
  }
  return runningMean3(means);
}
