/**
 * Toy NetCDF fixtures: a 10-degree global monthly SST field, 36 months
 * starting 1950-01, with an optional land blob and a choice between a
 * time-varying field and one that exactly equals its own climatology.
 */

import { NcAttr, NcVar, writeNetCDF3 } from "../src/netcdf-write.js";

export const FIX_NLAT = 18; // centers -85..85
export const FIX_NLON = 36; // centers 5..355
export const FIX_MONTHS = 36;
export const FIX_FIRST_YEAR = 1950;

export function fixtureLats(): number[] {
  return Array.from({ length: FIX_NLAT }, (_, i) => -85 + 10 * i);
}

export function fixtureLons(): number[] {
  return Array.from({ length: FIX_NLON }, (_, j) => 5 + 10 * j);
}

/** Mid-month timestamps in days since 1950-01-15. */
export function fixtureTimes(first = 0, count = FIX_MONTHS): number[] {
  const epoch = Date.UTC(FIX_FIRST_YEAR, 0, 15);
  return Array.from(
    { length: count },
    (_, t) => (Date.UTC(FIX_FIRST_YEAR, first + t, 15) - epoch) / 86400_000,
  );
}

export interface FixtureOptions {
  /** Value depends only on calendar month and cell, so anomalies vanish. */
  climatologyOnly?: boolean;
  /** Insert a NaN land blob well away from the index box. */
  withLand?: boolean;
  variableName?: string;
  /** Emit only months [first, first+count) of the 36-month series. */
  monthRange?: [number, number];
}

/** Smooth deterministic SST value for (month index, lat, lon). */
export function fixtureValue(t: number, lat: number, lon: number, climatologyOnly = false): number {
  const seasonal = 4 * Math.cos((2 * Math.PI * (t % 12)) / 12 + (lat > 0 ? 0 : Math.PI));
  const base = 28 - 0.006 * lat * lat + 1.5 * Math.sin((lon * Math.PI) / 180);
  if (climatologyOnly) return base + seasonal;
  // A slow oscillation concentrated near the equator plus a weak trend
  // gives nonzero anomalies with realistic size.
  const envelope = Math.exp(-((lat / 20) ** 2));
  const wobble = 2 * envelope * Math.sin((2 * Math.PI * t) / 40 + (lon * Math.PI) / 360);
  return base + seasonal + wobble + 0.01 * t;
}

export function isLand(lat: number, lon: number): boolean {
  // A continent-like blob in the northern mid-latitudes, far from 5S-5N.
  return lat >= 35 && lat <= 65 && lon >= 60 && lon <= 120;
}

export function buildFixture(options: FixtureOptions = {}): Buffer {
  const lats = fixtureLats();
  const lons = fixtureLons();
  const fill = -9.99e8;
  const [first, count] = options.monthRange ?? [0, FIX_MONTHS];
  const values: number[] = [];
  for (let t = first; t < first + count; t++) {
    for (const lat of lats) {
      for (const lon of lons) {
        if (options.withLand && isLand(lat, lon)) values.push(fill);
        else values.push(fixtureValue(t, lat, lon, options.climatologyOnly));
      }
    }
  }

  const sstAttrs: NcAttr[] = [
    { name: "units", type: "char", value: "degC" },
    { name: "_FillValue", type: "double", value: fill },
  ];
  const variables: NcVar[] = [
    { name: "lat", type: "double", dims: ["lat"], data: lats,
      attributes: [{ name: "units", type: "char", value: "degrees_north" }] },
    { name: "lon", type: "double", dims: ["lon"], data: lons,
      attributes: [{ name: "units", type: "char", value: "degrees_east" }] },
    { name: "time", type: "double", dims: ["time"], data: fixtureTimes(first, count),
      attributes: [{ name: "units", type: "char", value: "days since 1950-01-15" }] },
    { name: options.variableName ?? "sst", type: "double", dims: ["time", "lat", "lon"],
      data: values, attributes: sstAttrs },
  ];
  return writeNetCDF3(
    [
      { name: "time", size: count },
      { name: "lat", size: FIX_NLAT },
      { name: "lon", size: FIX_NLON },
    ],
    [{ name: "title", type: "char", value: "toy monthly sst fixture" }],
    variables,
  );
}
