import { describe, expect, it } from "vitest";

import { MissingCellsError } from "../src/errors.js";
import { STUDY_GRID, nNodes } from "../src/grid.js";
import { boxNodeIndices, computeOni } from "../src/oni.js";

describe("boxNodeIndices", () => {
  it("selects the 20 study-grid cells with centers in 5S-5N, 190-240E", () => {
    const box = boxNodeIndices(STUDY_GRID);
    expect(box.length).toBe(20); // 2 latitude bands x 10 longitude bands
    // Lat bands 10 and 11 have centers -2.5 and 2.5; lon bands 38..47
    // have centers 192.5..237.5.
    const expected: number[] = [];
    for (const i of [10, 11]) for (let j = 38; j <= 47; j++) expected.push(i * 72 + j);
    expect(box).toEqual(expected);
  });

  it("rejects a grid with no centers in the box", () => {
    expect(() =>
      boxNodeIndices({ latMin: 30, latMax: 60, lonMin: 0, lonMax: 360, resolution: 5 }),
    ).toThrowError(MissingCellsError);
  });
});

describe("computeOni", () => {
  const nodes = nNodes(STUDY_GRID);

  it("returns the constant for a constant box anomaly", () => {
    const anom = new Float64Array(4 * nodes);
    for (const idx of boxNodeIndices(STUDY_GRID)) {
      for (let t = 0; t < 4; t++) anom[t * nodes + idx] = 0.75;
    }
    const oni = computeOni(anom, STUDY_GRID, 4);
    for (const v of oni) expect(v).toBe(0.75);
  });

  it("ignores anomalies outside the box", () => {
    const anom = new Float64Array(3 * nodes).fill(100);
    for (const idx of boxNodeIndices(STUDY_GRID)) {
      for (let t = 0; t < 3; t++) anom[t * nodes + idx] = 0;
    }
    const oni = computeOni(anom, STUDY_GRID, 3);
    for (const v of oni) expect(v).toBe(0);
  });

  it("applies the centered 3-month mean with 2-month endpoint means", () => {
    const series = [3, 6, 9, 12, 30];
    const anom = new Float64Array(series.length * nodes);
    for (const idx of boxNodeIndices(STUDY_GRID)) {
      series.forEach((v, t) => {
        anom[t * nodes + idx] = v;
      });
    }
    const oni = computeOni(anom, STUDY_GRID, series.length);
    expect(oni[0]).toBeCloseTo((3 + 6) / 2, 14);
    expect(oni[1]).toBeCloseTo((3 + 6 + 9) / 3, 14);
    expect(oni[2]).toBeCloseTo((6 + 9 + 12) / 3, 14);
    expect(oni[3]).toBeCloseTo((9 + 12 + 30) / 3, 14);
    expect(oni[4]).toBeCloseTo((12 + 30) / 2, 14);
  });

  it("rejects fewer than 3 months", () => {
    expect(() => computeOni(new Float64Array(2 * nodes), STUDY_GRID, 2)).toThrowError(
      MissingCellsError,
    );
  });

  it("rejects a missing cell inside the box", () => {
    const anom = new Float64Array(3 * nodes);
    anom[1 * nodes + boxNodeIndices(STUDY_GRID)[5]] = NaN;
    expect(() => computeOni(anom, STUDY_GRID, 3)).toThrowError(/missing at time step 1/);
  });
});
