/** Deterministic 32-bit PRNG so parity fixtures reproduce across runs. */
export function mulberry32(seed: number): () => number {
  let state = seed >>> 0;
  return () => {
    state = (state + 0x6d2b79f5) >>> 0;
    let t = state;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

export function randomInt(rand: () => number, bound: number): number {
  return Math.floor(rand() * bound);
}

/** Binary PGM (P5); 16-bit samples are big-endian per the format. */
export function encodePgm(
  samples: Uint16Array | Uint8Array,
  width: number,
  height: number,
  maxval: number,
): Uint8Array {
  const header = new TextEncoder().encode(`P5\n${width} ${height}\n${maxval}\n`);
  const wide = maxval > 255;
  const payload = new Uint8Array(width * height * (wide ? 2 : 1));
  for (let i = 0; i < width * height; i++) {
    if (wide) {
      payload[2 * i] = (samples[i] >> 8) & 0xff;
      payload[2 * i + 1] = samples[i] & 0xff;
    } else {
      payload[i] = samples[i] & 0xff;
    }
  }
  const out = new Uint8Array(header.length + payload.length);
  out.set(header, 0);
  out.set(payload, header.length);
  return out;
}

export function sameBytes(a: Int32Array | Float32Array, b: Int32Array | Float32Array): boolean {
  if (a.constructor !== b.constructor || a.length !== b.length) return false;
  const ab = new Uint8Array(a.buffer, a.byteOffset, a.byteLength);
  const bb = new Uint8Array(b.buffer, b.byteOffset, b.byteLength);
  for (let i = 0; i < ab.length; i++) {
    if (ab[i] !== bb[i]) return false;
  }
  return true;
}
