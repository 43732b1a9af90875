/**
 * Sanity report for an HQGD file: manifest echo, shape checks, NaN scan,
 * and a per-calendar-month sample histogram.
 */

import { readFileSync } from "node:fs";

import { FormatError } from "./errors.js";
import { HqgdManifest, readHqgd } from "./hqgd.js";

export interface VerifyReport {
  manifest: HqgdManifest;
  nSamples: number;
  featureLength: number;
  nanFeatures: number;
  nanTargets: number;
  badMonths: number; // month tags outside 1..12
  monthCounts: number[]; // 12 entries, January first
}

export function verifyFile(path: string): VerifyReport {
  const { manifest, samples } = readHqgd(readFileSync(path));
  if (manifest.n_samples !== samples.length) {
    throw new FormatError(`manifest says ${manifest.n_samples} samples, parsed ${samples.length}`);
  }

  const monthCounts = new Array<number>(12).fill(0);
  let nanFeatures = 0;
  let nanTargets = 0;
  let badMonths = 0;
  for (const s of samples) {
    for (const v of s.features) if (!Number.isFinite(v)) nanFeatures++;
    if (!Number.isFinite(s.target)) nanTargets++;
    if (s.month >= 1 && s.month <= 12) monthCounts[s.month - 1]++;
    else badMonths++;
  }
  return {
    manifest,
    nSamples: samples.length,
    featureLength: manifest.n_nodes * manifest.d_0,
    nanFeatures,
    nanTargets,
    badMonths,
    monthCounts,
  };
}

const MONTHS = ["jan", "feb", "mar", "apr", "may", "jun", "jul", "aug", "sep", "oct", "nov", "dec"];

export function formatReport(r: VerifyReport): string {
  const lines = [
    `manifest: ${JSON.stringify({ ...r.manifest, nodes: undefined })}`,
    `samples: ${r.nSamples}, features per sample: ${r.featureLength} ` +
      `(${r.manifest.n_nodes} nodes x ${r.manifest.d_0})`,
    `non-finite features: ${r.nanFeatures}, non-finite targets: ${r.nanTargets}`,
    `month tags outside 1..12: ${r.badMonths}`,
    `samples per target month: ${r.monthCounts.map((c, i) => `${MONTHS[i]}=${c}`).join(" ")}`,
  ];
  return lines.join("\n");
}
