import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { convertToFile } from "../src/convert.js";
import { FormatError } from "../src/errors.js";
import { STUDY_GRID } from "../src/grid.js";
import { formatReport, verifyFile } from "../src/verify.js";
import { buildFixture, FIX_MONTHS } from "./fixture.js";

function freshConversion(): { dir: string; out: string } {
  const dir = mkdtempSync(join(tmpdir(), "hqgd-verify-"));
  const nc = join(dir, "toy.nc");
  writeFileSync(nc, buildFixture());
  const out = join(dir, "toy.hqgd");
  convertToFile(
    {
      inputs: [nc],
      variable: "sst",
      baselineYears: [1950, 1952],
      grid: STUDY_GRID,
      leadH: 1,
      window: 3,
      maskPolicy: "drop",
    },
    out,
  );
  return { dir, out };
}

describe("verify", () => {
  it("reports zero NaNs for a fresh conversion", () => {
    const { out } = freshConversion();
    const report = verifyFile(out);
    expect(report.nanFeatures).toBe(0);
    expect(report.nanTargets).toBe(0);
    expect(report.badMonths).toBe(0);
  });

  it("month histogram sums to the sample count", () => {
    const { out } = freshConversion();
    const report = verifyFile(out);
    const total = report.monthCounts.reduce((a, b) => a + b, 0);
    expect(total).toBe(report.nSamples);
    expect(report.nSamples).toBe(FIX_MONTHS - 3);
    // 33 consecutive targets from 1950-04: april..december appear 3x.
    expect(report.monthCounts[3]).toBe(3);
    expect(report.monthCounts[0]).toBe(2); // january 1951, 1952
  });

  it("surfaces format errors from a hand-truncated file", () => {
    const { dir, out } = freshConversion();
    const whole = readFileSync(out);
    const cut = join(dir, "cut.hqgd");
    writeFileSync(cut, whole.subarray(0, whole.length - 10));
    expect(() => verifyFile(cut)).toThrowError(FormatError);
  });

  it("formats a readable report", () => {
    const { out } = freshConversion();
    const text = formatReport(verifyFile(out));
    expect(text).toContain("samples: 33");
    expect(text).toContain("non-finite features: 0");
    expect(text).toContain("jan=2");
    expect(text).toContain("1656 nodes x 3");
  });
});
