/**
 * Minimal NetCDF-3 classic writer, enough to build valid monthly SST
 * files (fixed dimensions only, no record dimension). All header and
 * data words are big-endian per the classic format specification.
 */

const NC_DIMENSION = 0x0a;
const NC_VARIABLE = 0x0b;
const NC_ATTRIBUTE = 0x0c;

const TYPE_CODE: Record<string, number> = { char: 2, int: 4, float: 5, double: 6 };
const TYPE_SIZE: Record<string, number> = { char: 1, int: 4, float: 4, double: 8 };

export interface NcDim {
  name: string;
  size: number;
}

export interface NcAttr {
  name: string;
  type: "char" | "int" | "float" | "double";
  value: string | number | number[];
}

export interface NcVar {
  name: string;
  type: "int" | "float" | "double";
  dims: string[];
  attributes?: NcAttr[];
  data: ArrayLike<number>;
}

function pad4(n: number): number {
  return (n + 3) & ~3;
}

class Writer {
  chunks: Buffer[] = [];
  length = 0;

  u32(v: number): void {
    const b = Buffer.alloc(4);
    b.writeUInt32BE(v >>> 0);
    this.push(b);
  }

  name(s: string): void {
    const bytes = Buffer.from(s, "ascii");
    this.u32(bytes.length);
    this.push(bytes);
    this.push(Buffer.alloc(pad4(bytes.length) - bytes.length));
  }

  push(b: Buffer): void {
    this.chunks.push(b);
    this.length += b.length;
  }

  buffer(): Buffer {
    return Buffer.concat(this.chunks);
  }
}

function attrValues(attr: NcAttr): Buffer {
  if (attr.type === "char") {
    const bytes = Buffer.from(String(attr.value), "ascii");
    const out = Buffer.alloc(pad4(bytes.length));
    bytes.copy(out);
    return out;
  }
  const values = Array.isArray(attr.value) ? attr.value : [Number(attr.value)];
  const size = TYPE_SIZE[attr.type];
  const out = Buffer.alloc(pad4(values.length * size));
  values.forEach((v, i) => {
    if (attr.type === "int") out.writeInt32BE(v | 0, i * 4);
    else if (attr.type === "float") out.writeFloatBE(v, i * 4);
    else out.writeDoubleBE(v, i * 8);
  });
  return out;
}

function attrCount(attr: NcAttr): number {
  if (attr.type === "char") return Buffer.from(String(attr.value), "ascii").length;
  return Array.isArray(attr.value) ? attr.value.length : 1;
}

function writeAttrList(w: Writer, attrs: NcAttr[]): void {
  if (attrs.length === 0) {
    w.u32(0);
    w.u32(0);
    return;
  }
  w.u32(NC_ATTRIBUTE);
  w.u32(attrs.length);
  for (const attr of attrs) {
    w.name(attr.name);
    w.u32(TYPE_CODE[attr.type]);
    w.u32(attrCount(attr));
    w.push(attrValues(attr));
  }
}

function varData(v: NcVar, count: number): Buffer {
  const size = TYPE_SIZE[v.type];
  const out = Buffer.alloc(pad4(count * size));
  for (let i = 0; i < count; i++) {
    const x = Number(v.data[i]);
    if (v.type === "int") out.writeInt32BE(x | 0, i * 4);
    else if (v.type === "float") out.writeFloatBE(x, i * 4);
    else out.writeDoubleBE(x, i * 8);
  }
  return out;
}

/** Serialize dimensions, attributes, and variables into one classic file. */
export function writeNetCDF3(
  dims: NcDim[],
  globalAttributes: NcAttr[],
  variables: NcVar[],
): Buffer {
  const dimIndex = new Map(dims.map((d, i) => [d.name, i]));
  const counts = variables.map((v) =>
    v.dims.reduce((acc, name) => {
      const i = dimIndex.get(name);
      if (i === undefined) throw new Error(`unknown dimension ${name}`);
      return acc * dims[i].size;
    }, 1),
  );
  variables.forEach((v, i) => {
    if (v.data.length !== counts[i]) {
      throw new Error(`variable ${v.name}: ${v.data.length} values for shape of ${counts[i]}`);
    }
  });

  // Two passes: the first with zero data offsets just measures the header.
  const serialize = (begins: number[]): Writer => {
    const w = new Writer();
    w.push(Buffer.from([0x43, 0x44, 0x46, 0x01])); // 'CDF' version 1
    w.u32(0); // numrecs; no record dimension is used
    if (dims.length === 0) {
      w.u32(0);
      w.u32(0);
    } else {
      w.u32(NC_DIMENSION);
      w.u32(dims.length);
      for (const d of dims) {
        w.name(d.name);
        w.u32(d.size);
      }
    }
    writeAttrList(w, globalAttributes);
    if (variables.length === 0) {
      w.u32(0);
      w.u32(0);
    } else {
      w.u32(NC_VARIABLE);
      w.u32(variables.length);
      variables.forEach((v, i) => {
        w.name(v.name);
        w.u32(v.dims.length);
        for (const name of v.dims) w.u32(dimIndex.get(name)!);
        writeAttrList(w, v.attributes ?? []);
        w.u32(TYPE_CODE[v.type]);
        w.u32(pad4(counts[i] * TYPE_SIZE[v.type])); // vsize
        w.u32(begins[i]);
      });
    }
    return w;
  };

  const headerLength = serialize(variables.map(() => 0)).length;
  const begins: number[] = [];
  let offset = headerLength;
  variables.forEach((v, i) => {
    begins.push(offset);
    offset += pad4(counts[i] * TYPE_SIZE[v.type]);
  });

  const w = serialize(begins);
  variables.forEach((v, i) => w.push(varData(v, counts[i])));
  return w.buffer();
}
