import { describe, expect, it } from "vitest";
import { NetCDFReader } from "netcdfjs";

import { writeNetCDF3 } from "../src/netcdf-write.js";
import {
  checkMonthly,
  monthIndex,
  parseTimeAxis,
  readMonthlyField,
} from "../src/netcdf.js";
import { CalendarGapError, MissingVariableError, NonMonthlyDataError } from "../src/errors.js";
import { buildFixture, fixtureValue, FIX_MONTHS, FIX_NLAT, FIX_NLON } from "./fixture.js";

describe("netcdf writer", () => {
  it("round-trips dimensions, attributes, and values through netcdfjs", () => {
    const buf = writeNetCDF3(
      [{ name: "x", size: 3 }],
      [{ name: "title", type: "char", value: "tiny" }],
      [
        { name: "x", type: "double", dims: ["x"], data: [1.5, 2.5, 3.5] },
        {
          name: "v",
          type: "float",
          dims: ["x"],
          data: [10, 20, 30],
          attributes: [{ name: "scale", type: "double", value: 2.0 }],
        },
      ],
    );
    const reader = new NetCDFReader(buf);
    expect(reader.dimensions).toEqual([{ name: "x", size: 3 }]);
    expect(reader.getAttribute("title")).toBe("tiny");
    expect(reader.getDataVariable("x")).toEqual([1.5, 2.5, 3.5]);
    expect(reader.getDataVariable("v")).toEqual([10, 20, 30]);
    const v = reader.variables.find((vv) => vv.name === "v")!;
    expect(v.attributes[0]).toMatchObject({ name: "scale", value: 2 });
  });

  it("pads odd-length names and char attributes to 4-byte boundaries", () => {
    const buf = writeNetCDF3(
      [{ name: "abcde", size: 2 }],
      [{ name: "note", type: "char", value: "xyz" }],
      [{ name: "abcde", type: "int", dims: ["abcde"], data: [7, -7] }],
    );
    const reader = new NetCDFReader(buf);
    expect(reader.getAttribute("note")).toBe("xyz");
    expect(reader.getDataVariable("abcde")).toEqual([7, -7]);
  });
});

describe("monthly field reader", () => {
  it("reads the toy fixture with correct shape and calendar", () => {
    const field = readMonthlyField(buildFixture(), "sst");
    expect(field.lats.length).toBe(FIX_NLAT);
    expect(field.lons.length).toBe(FIX_NLON);
    expect(field.months.length).toBe(FIX_MONTHS);
    expect(field.months[0]).toEqual({ year: 1950, month: 1 });
    expect(field.months[12]).toEqual({ year: 1951, month: 1 });
    expect(field.months[35]).toEqual({ year: 1952, month: 12 });
    // spot value: float64 variable stores exact doubles
    const v = field.values[0 * FIX_NLAT * FIX_NLON + 0 * FIX_NLON + 0];
    expect(v).toBe(fixtureValue(0, -85, 5));
  });

  it("maps fill values to NaN", () => {
    const field = readMonthlyField(buildFixture({ withLand: true }), "sst");
    const land = field.values.filter((v) => Number.isNaN(v)).length;
    expect(land).toBeGreaterThan(0);
    expect(land % FIX_MONTHS).toBe(0); // same blob every month
  });

  it("rejects a missing variable with the available names", () => {
    expect(() => readMonthlyField(buildFixture(), "tos")).toThrowError(MissingVariableError);
    expect(() => readMonthlyField(buildFixture(), "tos")).toThrowError(/file has:.*sst/);
  });

  it("flips descending latitudes to ascending", () => {
    const asc = readMonthlyField(buildFixture(), "sst");
    // Rebuild the same field with latitude reversed.
    const lats = Array.from(asc.lats).reverse();
    const values: number[] = [];
    for (let t = 0; t < FIX_MONTHS; t++) {
      for (const lat of lats) for (const lon of asc.lons) values.push(fixtureValue(t, lat, lon));
    }
    const buf = writeNetCDF3(
      [
        { name: "time", size: FIX_MONTHS },
        { name: "lat", size: FIX_NLAT },
        { name: "lon", size: FIX_NLON },
      ],
      [],
      [
        { name: "lat", type: "double", dims: ["lat"], data: lats },
        { name: "lon", type: "double", dims: ["lon"], data: Array.from(asc.lons) },
        { name: "time", type: "double", dims: ["time"],
          data: Array.from({ length: FIX_MONTHS }, (_, t) => t),
          attributes: [{ name: "units", type: "char", value: "months since 1950-01" }] },
        { name: "sst", type: "double", dims: ["time", "lat", "lon"], data: values },
      ],
    );
    const flipped = readMonthlyField(buf, "sst");
    expect(Array.from(flipped.lats)).toEqual(Array.from(asc.lats));
    expect(Array.from(flipped.values)).toEqual(Array.from(asc.values));
  });

  it("rotates -180..180 longitudes onto 0..360", () => {
    const lons = [-175, -65, 45, 155]; // wraps to 185, 295, 45, 155
    const lats = [-5, 5];
    const values: number[] = [];
    for (const lat of lats) for (const lon of lons) values.push(lat * 1000 + lon);
    const buf = writeNetCDF3(
      [
        { name: "time", size: 1 },
        { name: "lat", size: 2 },
        { name: "lon", size: 4 },
      ],
      [],
      [
        { name: "lat", type: "double", dims: ["lat"], data: lats },
        { name: "lon", type: "double", dims: ["lon"], data: lons },
        { name: "time", type: "double", dims: ["time"], data: [0],
          attributes: [{ name: "units", type: "char", value: "months since 2000-01" }] },
        { name: "sst", type: "double", dims: ["time", "lat", "lon"], data: values },
      ],
    );
    const field = readMonthlyField(buf, "sst");
    expect(Array.from(field.lons)).toEqual([45, 155, 185, 295]);
    expect(Array.from(field.values.subarray(0, 4))).toEqual([
      -5000 + 45, -5000 + 155, -5000 + -175, -5000 + -65,
    ]);
  });
});

describe("time axis", () => {
  it("parses days, hours, and months units to the same calendar", () => {
    const days = parseTimeAxis(new Float64Array([0, 31, 59]), "days since 2001-01-15");
    expect(days.map(monthIndex)).toEqual([
      monthIndex({ year: 2001, month: 1 }),
      monthIndex({ year: 2001, month: 2 }),
      monthIndex({ year: 2001, month: 3 }),
    ]);
    const hours = parseTimeAxis(new Float64Array([0, 31 * 24]), "hours since 2001-01-15 00:00:00");
    expect(hours[1]).toEqual({ year: 2001, month: 2 });
    const months = parseTimeAxis(new Float64Array([0, 1, 13]), "months since 1999-12");
    expect(months[0]).toEqual({ year: 1999, month: 12 });
    expect(months[2]).toEqual({ year: 2001, month: 1 });
  });

  it("rejects unknown units", () => {
    expect(() => parseTimeAxis(new Float64Array([0]), "fortnights since 1900-01")).toThrowError(
      NonMonthlyDataError,
    );
  });

  it("reports calendar gaps with both endpoints", () => {
    const months = [
      { year: 1950, month: 11 },
      { year: 1950, month: 12 },
      { year: 1951, month: 3 },
    ];
    expect(() => checkMonthly(months)).toThrowError(CalendarGapError);
    expect(() => checkMonthly(months)).toThrowError(/1950-12.*1951-03/);
  });

  it("rejects duplicated or backwards months as non-monthly", () => {
    expect(() =>
      checkMonthly([
        { year: 1950, month: 5 },
        { year: 1950, month: 5 },
      ]),
    ).toThrowError(NonMonthlyDataError);
  });
});
