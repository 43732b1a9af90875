/**
 * The conversion pipeline: read monthly NetCDF SST, regrid to the target
 * grid by area-weighted block averaging, subtract the per-month
 * climatology over the baseline years, build index targets, and emit
 * HQGD samples with a trailing feature window per node.
 */

import { readFileSync, writeFileSync } from "node:fs";
import { basename } from "node:path";

import { monthlyClimatology, subtractClimatology } from "./climatology.js";
import { CalendarGapError, ConverterError, FormatError } from "./errors.js";
import { STUDY_GRID, TargetGrid, gridToJson, nNodes } from "./grid.js";
import { HqgdManifest, HqgdSample, writeHqgd } from "./hqgd.js";
import { MonthlyField, checkMonthly, readMonthlyField } from "./netcdf.js";
import { computeOni } from "./oni.js";
import { regridMonthly } from "./regrid.js";

export interface ConversionSpec {
  inputs: string[];
  variable: string;
  baselineYears: [number, number];
  grid: TargetGrid;
  leadH: number;
  window: number; // feature months per node (d_0)
  /** "drop" removes cells with any missing month; "zero" keeps them with zero anomalies. */
  maskPolicy: "drop" | "zero";
}

export const DEFAULT_SPEC: Omit<ConversionSpec, "inputs" | "baselineYears"> = {
  variable: "sst",
  grid: STUDY_GRID,
  leadH: 1,
  window: 3,
  maskPolicy: "drop",
};

export interface ConversionResult {
  manifest: HqgdManifest;
  samples: HqgdSample[];
  buffer: Buffer;
  droppedCells: number;
  months: number;
}

function concatFields(fields: MonthlyField[]): MonthlyField {
  const first = fields[0];
  for (const f of fields.slice(1)) {
    const sameGrid =
      f.lats.length === first.lats.length &&
      f.lons.length === first.lons.length &&
      f.lats.every((v, i) => v === first.lats[i]) &&
      f.lons.every((v, i) => v === first.lons[i]);
    if (!sameGrid) throw new FormatError("input files are on different grids");
  }
  const months = fields.flatMap((f) => f.months);
  checkMonthly(months); // catches gaps between files too
  const plane = first.lats.length * first.lons.length;
  const values = new Float64Array(months.length * plane);
  let offset = 0;
  for (const f of fields) {
    values.set(f.values, offset);
    offset += f.values.length;
  }
  return { lats: first.lats, lons: first.lons, months, values };
}

export function convert(spec: ConversionSpec): ConversionResult {
  if (spec.window < 1 || spec.leadH < 1) {
    throw new ConverterError("window and lead must be >= 1");
  }
  if (spec.inputs.length === 0) throw new ConverterError("no input files given");

  const fields = spec.inputs.map((path) =>
    readMonthlyField(readFileSync(path), spec.variable),
  );
  const field = concatFields(fields);
  const nT = field.months.length;
  const nodes = nNodes(spec.grid);

  const { values } = regridMonthly(field, spec.grid);
  const clim = monthlyClimatology(values, field.months, nodes, spec.baselineYears);
  const anomalies = subtractClimatology(values, field.months, clim, nodes);

  // Index targets use the full grid, before any cell dropping; missing
  // box cells are fatal because the index is undefined without them.
  const oni = computeOni(anomalies, spec.grid, nT);

  // Node set per mask policy. A cell counts as unusable if any month is
  // missing, which covers land (always missing) and transient gaps.
  const usable: number[] = [];
  for (let k = 0; k < nodes; k++) {
    let ok = true;
    for (let t = 0; t < nT && ok; t++) ok = !Number.isNaN(anomalies[t * nodes + k]);
    if (ok) usable.push(k);
  }
  let kept: number[];
  if (spec.maskPolicy === "drop") {
    kept = usable;
    if (kept.length === 0) throw new ConverterError("every grid cell has missing months");
  } else {
    kept = Array.from({ length: nodes }, (_, k) => k);
    for (let i = 0; i < anomalies.length; i++) {
      if (Number.isNaN(anomalies[i])) anomalies[i] = 0;
    }
  }

  const nSamples = nT - (spec.window - 1) - spec.leadH;
  if (nSamples < 1) {
    throw new ConverterError(
      `${nT} months cannot supply a ${spec.window}-month window plus lead ${spec.leadH}`,
    );
  }

  const samples: HqgdSample[] = [];
  for (let s = 0; s < nSamples; s++) {
    const tEnd = spec.window - 1 + s; // last month inside the feature window
    const tTarget = tEnd + spec.leadH;
    const features = new Float32Array(kept.length * spec.window);
    for (let k = 0; k < kept.length; k++) {
      for (let j = 0; j < spec.window; j++) {
        features[k * spec.window + j] = anomalies[(tEnd - spec.window + 1 + j) * nodes + kept[k]];
      }
    }
    samples.push({
      year: field.months[tTarget].year,
      month: field.months[tTarget].month,
      target: oni[tTarget],
      features,
    });
  }

  const manifest: HqgdManifest = {
    n_samples: nSamples,
    n_nodes: kept.length,
    d_0: spec.window,
    lead_h: spec.leadH,
    source:
      `${spec.variable} from ${spec.inputs.map((p) => basename(p)).join("+")} ` +
      `(baseline ${spec.baselineYears[0]}-${spec.baselineYears[1]}, mask=${spec.maskPolicy})`,
    grid: gridToJson(spec.grid),
    mask_policy: spec.maskPolicy,
  };
  if (kept.length !== nodes) manifest.nodes = kept;

  return {
    manifest,
    samples,
    buffer: writeHqgd(manifest, samples),
    droppedCells: nodes - kept.length,
    months: nT,
  };
}

export function convertToFile(spec: ConversionSpec, outPath: string): ConversionResult {
  const result = convert(spec);
  writeFileSync(outPath, result.buffer);
  return result;
}
