/**
 * HQGD dataset file I/O, byte-compatible with the training engine:
 *
 *   magic b"HQGD" | u32 version | u64 manifest length | manifest JSON
 *   then per sample:
 *     i32 year | i32 target month | f64 target | f32 x (nNodes * d0)
 *
 * All values little-endian; features row-major (node, feature).
 */

import { FormatError } from "./errors.js";

export const HQGD_MAGIC = "HQGD";
export const HQGD_VERSION = 1;

export interface HqgdSample {
  year: number;
  month: number; // 1..12, calendar month of the target
  target: number;
  features: Float32Array; // (nNodes * d0) node-major
}

export interface HqgdManifest {
  n_samples: number;
  n_nodes: number;
  d_0: number;
  lead_h: number;
  source: string;
  grid: Record<string, number> | null;
  [key: string]: unknown;
}

export function writeHqgd(manifest: HqgdManifest, samples: HqgdSample[]): Buffer {
  const { n_nodes, d_0 } = manifest;
  const mjson = Buffer.from(JSON.stringify(sortKeys(manifest)), "utf-8");
  const sampleBytes = 16 + 4 * n_nodes * d_0;
  const out = Buffer.alloc(16 + mjson.length + samples.length * sampleBytes);

  out.write(HQGD_MAGIC, 0, "ascii");
  out.writeUInt32LE(HQGD_VERSION, 4);
  out.writeBigUInt64LE(BigInt(mjson.length), 8);
  mjson.copy(out, 16);

  let offset = 16 + mjson.length;
  for (const s of samples) {
    if (s.features.length !== n_nodes * d_0) {
      throw new FormatError(
        `sample has ${s.features.length} features, manifest says ${n_nodes}*${d_0}`,
      );
    }
    for (const v of s.features) {
      if (!Number.isFinite(v)) throw new FormatError("non-finite feature value");
    }
    if (!Number.isFinite(s.target)) throw new FormatError("non-finite target value");
    out.writeInt32LE(s.year, offset);
    out.writeInt32LE(s.month, offset + 4);
    out.writeDoubleLE(s.target, offset + 8);
    offset += 16;
    for (const v of s.features) {
      out.writeFloatLE(v, offset);
      offset += 4;
    }
  }
  return out;
}

export function readHqgd(data: Buffer): { manifest: HqgdManifest; samples: HqgdSample[] } {
  if (data.length < 16 || data.toString("ascii", 0, 4) !== HQGD_MAGIC) {
    throw new FormatError("not an HQGD file");
  }
  const version = data.readUInt32LE(4);
  if (version !== HQGD_VERSION) throw new FormatError(`unsupported version ${version}`);
  const mlen = Number(data.readBigUInt64LE(8));
  if (16 + mlen > data.length) throw new FormatError("manifest cut short");

  let manifest: HqgdManifest;
  try {
    manifest = JSON.parse(data.toString("utf-8", 16, 16 + mlen));
  } catch (err) {
    throw new FormatError(`manifest is not valid JSON: ${err}`);
  }
  for (const key of ["n_samples", "n_nodes", "d_0", "lead_h"]) {
    if (!(key in manifest)) throw new FormatError(`manifest missing "${key}"`);
  }

  const { n_samples, n_nodes, d_0 } = manifest;
  const sampleBytes = 16 + 4 * n_nodes * d_0;
  const expected = 16 + mlen + n_samples * sampleBytes;
  if (data.length < expected) {
    throw new FormatError(`expected ${expected} bytes for ${n_samples} samples, file has ${data.length}`);
  }
  if (data.length > expected) throw new FormatError("trailing bytes after declared samples");

  const samples: HqgdSample[] = [];
  let offset = 16 + mlen;
  for (let i = 0; i < n_samples; i++) {
    const year = data.readInt32LE(offset);
    const month = data.readInt32LE(offset + 4);
    const target = data.readDoubleLE(offset + 8);
    offset += 16;
    const features = new Float32Array(n_nodes * d_0);
    for (let k = 0; k < features.length; k++) {
      features[k] = data.readFloatLE(offset);
      offset += 4;
    }
    samples.push({ year, month, target, features });
  }
  return { manifest, samples };
}

function sortKeys<T extends Record<string, unknown>>(obj: T): Record<string, unknown> {
  return Object.fromEntries(Object.entries(obj).sort(([a], [b]) => (a < b ? -1 : 1)));
}
