/**
 * Reader/writer for the .wvt tensor container.
 *
 * Layout (all integers little-endian): magic "WVLT", version u8 (= 1),
 * dtype code u8 (1 = float32, 2 = int32), tensor count u16; then per
 * tensor: ndim u8, dims u32 each, metadata length u32, UTF-8 "key=value"
 * lines, and the row-major payload.
 *
 * Every declared length is validated against the remaining bytes before
 * anything is touched, so corrupt input surfaces as CorruptContainer
 * rather than a crash or an oversized allocation.
 */

import { CorruptContainer, VersionMismatch } from "./errors.js";

export type WireDtype = "float32" | "int32";

export interface TensorRecord {
  dims: number[];
  dtype: WireDtype;
  data: Float32Array | Int32Array;
  metadata: Record<string, string>;
}

const MAGIC = [0x57, 0x56, 0x4c, 0x54]; // "WVLT"
const VERSION = 1;

const utf8Decoder = new TextDecoder("utf-8", { fatal: true });
const utf8Encoder = new TextEncoder();

function elementCount(dims: number[]): number {
  let count = 1;
  for (const d of dims) {
    count *= d;
    // anything this large cannot fit in a real buffer; bail before overflow
    if (count > Number.MAX_SAFE_INTEGER / 8) return Number.MAX_SAFE_INTEGER;
  }
  return count;
}

function parseMetadata(text: string, index: number): Record<string, string> {
  const metadata: Record<string, string> = {};
  if (text.length === 0) return metadata;
  for (const line of text.split("\n")) {
    const eq = line.indexOf("=");
    if (eq < 0) {
      throw new CorruptContainer(`tensor ${index} metadata line ${JSON.stringify(line)} lacks '='`);
    }
    metadata[line.slice(0, eq)] = line.slice(eq + 1);
  }
  return metadata;
}

/**
 * Parse container bytes into tensor records.
 *
 * Payload arrays are zero-copy views into `bytes` when alignment allows,
 * so they stay valid only as long as the input buffer does.
 */
export function read_container(bytes: Uint8Array): TensorRecord[] {
  const view = new DataView(bytes.buffer, bytes.byteOffset, bytes.byteLength);
  let pos = 0;

  const need = (count: number, what: string): void => {
    if (pos + count > bytes.byteLength) {
      throw new CorruptContainer(`truncated while reading ${what}`);
    }
  };

  need(8, "header");
  for (let i = 0; i < 4; i++) {
    if (bytes[i] !== MAGIC[i]) {
      throw new CorruptContainer(`bad magic at byte ${i}`);
    }
  }
  const version = view.getUint8(4);
  if (version !== VERSION) {
    throw new VersionMismatch(`unsupported container version ${version}`);
  }
  const dtypeCode = view.getUint8(5);
  if (dtypeCode !== 1 && dtypeCode !== 2) {
    throw new CorruptContainer(`unknown dtype code ${dtypeCode}`);
  }
  const dtype: WireDtype = dtypeCode === 1 ? "float32" : "int32";
  const count = view.getUint16(6, true);
  pos = 8;

  const records: TensorRecord[] = [];
  for (let index = 0; index < count; index++) {
    need(1, `tensor ${index} rank`);
    const ndim = view.getUint8(pos);
    pos += 1;
    need(4 * ndim, `tensor ${index} dims`);
    const dims: number[] = [];
    for (let d = 0; d < ndim; d++) {
      dims.push(view.getUint32(pos + 4 * d, true));
    }
    pos += 4 * ndim;
    need(4, `tensor ${index} metadata length`);
    const metaLength = view.getUint32(pos, true);
    pos += 4;
    need(metaLength, `tensor ${index} metadata`);
    let metaText: string;
    try {
      metaText = utf8Decoder.decode(bytes.subarray(pos, pos + metaLength));
    } catch {
      throw new CorruptContainer(`tensor ${index} metadata is not UTF-8`);
    }
    const metadata = parseMetadata(metaText, index);
    pos += metaLength;

    const elements = elementCount(dims);
    const payload = elements * 4;
    need(payload, `tensor ${index} payload`);
    const byteStart = bytes.byteOffset + pos;
    let data: Float32Array | Int32Array;
    if (byteStart % 4 === 0) {
      data =
        dtype === "float32"
          ? new Float32Array(bytes.buffer, byteStart, elements)
          : new Int32Array(bytes.buffer, byteStart, elements);
    } else {
      // explicit copy: Buffer.slice would alias Node's shared pool
      const copy = new Uint8Array(payload);
      copy.set(bytes.subarray(pos, pos + payload));
      data =
        dtype === "float32"
          ? new Float32Array(copy.buffer, 0, elements)
          : new Int32Array(copy.buffer, 0, elements);
    }
    pos += payload;
    records.push({ dims, dtype, data, metadata });
  }
  if (pos !== bytes.byteLength) {
    throw new CorruptContainer(`${bytes.byteLength - pos} trailing bytes after last tensor`);
  }
  return records;
}

export interface WritableTensor {
  data: Float32Array | Int32Array;
  dims?: number[];
  metadata?: Record<string, string>;
}

/** Serialize records to container bytes (float32 code for an empty list). */
export function write_container(records: WritableTensor[]): Uint8Array {
  const kinds = new Set(records.map((r) => (r.data instanceof Float32Array ? 1 : 2)));
  if (kinds.size > 1) {
    throw new Error("all tensors in one container must share a dtype");
  }
  if (records.length > 0xffff) {
    throw new Error("container holds at most 65535 tensors");
  }
  const dtypeCode = kinds.size ? [...kinds][0] : 1;

  const chunks: Uint8Array[] = [];
  const header = new Uint8Array(8);
  const headerView = new DataView(header.buffer);
  header.set(MAGIC, 0);
  headerView.setUint8(4, VERSION);
  headerView.setUint8(5, dtypeCode);
  headerView.setUint16(6, records.length, true);
  chunks.push(header);

  for (const record of records) {
    const dims = record.dims ?? [record.data.length];
    if (elementCount(dims) !== record.data.length) {
      throw new Error(`dims ${JSON.stringify(dims)} do not match ${record.data.length} elements`);
    }
    const lines: string[] = [];
    for (const [key, value] of Object.entries(record.metadata ?? {})) {
      if (key.includes("=") || key.includes("\n") || value.includes("\n")) {
        throw new Error(`metadata entry ${JSON.stringify(key)} contains reserved characters`);
      }
      lines.push(`${key}=${value}`);
    }
    const meta = utf8Encoder.encode(lines.join("\n"));
    const head = new Uint8Array(1 + 4 * dims.length + 4);
    const headView = new DataView(head.buffer);
    headView.setUint8(0, dims.length);
    dims.forEach((d, i) => headView.setUint32(1 + 4 * i, d, true));
    headView.setUint32(1 + 4 * dims.length, meta.length, true);
    chunks.push(head, meta);
    chunks.push(new Uint8Array(record.data.buffer, record.data.byteOffset, record.data.byteLength));
  }

  const total = chunks.reduce((sum, c) => sum + c.byteLength, 0);
  const out = new Uint8Array(total);
  let offset = 0;
  for (const chunk of chunks) {
    out.set(chunk, offset);
    offset += chunk.byteLength;
  }
  return out;
}
