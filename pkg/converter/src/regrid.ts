/**
 * Area-weighted block averaging onto the target grid.
 *
 * Every target cell value is the mean of the overlapping source cells,
 * weighted by true spherical overlap area: sin-latitude band height
 * times longitude width, with longitude intervals compared modulo 360.
 * Missing source cells (NaN) drop out of both numerator and denominator,
 * so the average is over observed area only.
 */

import { TargetGrid, nLat, nLon, validateGrid } from "./grid.js";
import { MonthlyField } from "./netcdf.js";

const DEG = Math.PI / 180;

interface SparseWeight {
  index: number;
  weight: number;
}

/** Cell edges from ascending band centers; end cells mirror their half-width. */
export function edgesFromCenters(centers: Float64Array): Float64Array {
  const n = centers.length;
  if (n < 2) throw new Error("need at least two band centers to infer edges");
  const edges = new Float64Array(n + 1);
  for (let i = 1; i < n; i++) edges[i] = 0.5 * (centers[i - 1] + centers[i]);
  edges[0] = centers[0] - (edges[1] - centers[0]);
  edges[n] = centers[n - 1] + (centers[n - 1] - edges[n - 1]);
  return edges;
}

function clampLat(edges: Float64Array): Float64Array {
  return Float64Array.from(edges, (e) => Math.min(90, Math.max(-90, e)));
}

/** Latitude overlap weights: sin(hi) - sin(lo) per overlapped source band. */
function latWeights(srcEdges: Float64Array, lo: number, hi: number): SparseWeight[] {
  const out: SparseWeight[] = [];
  for (let i = 0; i + 1 < srcEdges.length; i++) {
    const a = Math.max(lo, srcEdges[i]);
    const b = Math.min(hi, srcEdges[i + 1]);
    if (b > a) out.push({ index: i, weight: Math.sin(b * DEG) - Math.sin(a * DEG) });
  }
  return out;
}

/** Longitude overlap width in degrees, intervals compared modulo 360. */
function lonWeights(srcEdges: Float64Array, lo: number, hi: number): SparseWeight[] {
  const out: SparseWeight[] = [];
  for (let j = 0; j + 1 < srcEdges.length; j++) {
    let weight = 0;
    for (const shift of [-360, 0, 360]) {
      const a = Math.max(lo, srcEdges[j] + shift);
      const b = Math.min(hi, srcEdges[j + 1] + shift);
      if (b > a) weight += b - a;
    }
    if (weight > 0) out.push({ index: j, weight });
  }
  return out;
}

export interface RegridResult {
  /** (time, node) row-major target values; NaN where no source cell overlaps. */
  values: Float64Array;
  /** Mask-independent overlap area of each target cell with the source domain. */
  cellArea: Float64Array;
}

export function regridMonthly(field: MonthlyField, grid: TargetGrid): RegridResult {
  validateGrid(grid);
  const srcLatEdges = clampLat(edgesFromCenters(field.lats));
  const srcLonEdges = edgesFromCenters(field.lons);
  const nT = field.months.length;
  const srcLat = field.lats.length;
  const srcLon = field.lons.length;
  const rows = nLat(grid);
  const cols = nLon(grid);

  const latW: SparseWeight[][] = [];
  for (let r = 0; r < rows; r++) {
    const lo = grid.latMin + r * grid.resolution;
    latW.push(latWeights(srcLatEdges, lo, lo + grid.resolution));
  }
  const lonW: SparseWeight[][] = [];
  for (let c = 0; c < cols; c++) {
    const lo = grid.lonMin + c * grid.resolution;
    lonW.push(lonWeights(srcLonEdges, lo, lo + grid.resolution));
  }

  const values = new Float64Array(nT * rows * cols).fill(NaN);
  const cellArea = new Float64Array(rows * cols);
  for (let r = 0; r < rows; r++) {
    for (let c = 0; c < cols; c++) {
      let area = 0;
      for (const lw of latW[r]) for (const cw of lonW[c]) area += lw.weight * cw.weight;
      cellArea[r * cols + c] = area;
    }
  }

  for (let t = 0; t < nT; t++) {
    const plane = t * srcLat * srcLon;
    for (let r = 0; r < rows; r++) {
      for (let c = 0; c < cols; c++) {
        let num = 0;
        let den = 0;
        for (const lw of latW[r]) {
          const row = plane + lw.index * srcLon;
          for (const cw of lonW[c]) {
            const v = field.values[row + cw.index];
            if (Number.isNaN(v)) continue;
            const w = lw.weight * cw.weight;
            num += w * v;
            den += w;
          }
        }
        if (den > 0) values[t * rows * cols + r * cols + c] = num / den;
      }
    }
  }
  return { values, cellArea };
}
