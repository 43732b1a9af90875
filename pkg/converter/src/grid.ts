/**
 * Target grid geometry: regular latitude/longitude bands, node order
 * lat-major with band centers ascending (node = latIndex * nLon + lonIndex).
 */

export interface TargetGrid {
  latMin: number;
  latMax: number;
  lonMin: number;
  lonMax: number;
  resolution: number;
}

/** The 5-degree study domain, 55S-60N over all longitudes (23 x 72 nodes). */
export const STUDY_GRID: TargetGrid = {
  latMin: -55,
  latMax: 60,
  lonMin: 0,
  lonMax: 360,
  resolution: 5,
};

export function nLat(grid: TargetGrid): number {
  return Math.round((grid.latMax - grid.latMin) / grid.resolution);
}

export function nLon(grid: TargetGrid): number {
  return Math.round((grid.lonMax - grid.lonMin) / grid.resolution);
}

export function nNodes(grid: TargetGrid): number {
  return nLat(grid) * nLon(grid);
}

export function latCenters(grid: TargetGrid): Float64Array {
  const out = new Float64Array(nLat(grid));
  for (let i = 0; i < out.length; i++) out[i] = grid.latMin + grid.resolution * (i + 0.5);
  return out;
}

export function lonCenters(grid: TargetGrid): Float64Array {
  const out = new Float64Array(nLon(grid));
  for (let i = 0; i < out.length; i++) out[i] = grid.lonMin + grid.resolution * (i + 0.5);
  return out;
}

export function validateGrid(grid: TargetGrid): void {
  if (grid.resolution <= 0) throw new Error("resolution must be positive");
  for (const [lo, hi] of [
    [grid.latMin, grid.latMax],
    [grid.lonMin, grid.lonMax],
  ]) {
    if (hi <= lo) throw new Error("grid extent must be increasing");
    const bands = (hi - lo) / grid.resolution;
    if (Math.abs(bands - Math.round(bands)) > 1e-9) {
      throw new Error("extent must be a whole number of bands");
    }
  }
}

/** Manifest form matching the primary engine's grid schema. */
export function gridToJson(grid: TargetGrid): Record<string, number> {
  return {
    lat_min: grid.latMin,
    lat_max: grid.latMax,
    lon_min: grid.lonMin,
    lon_max: grid.lonMax,
    resolution: grid.resolution,
  };
}
