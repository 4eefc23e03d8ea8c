/**
 * HTTP client for the wavelet-prep service.
 *
 * Arrays travel as .wvt container bytes in both directions, so results
 * are bit-exact: a reversible-mode tensor fetched here equals the one the
 * CLI writes to disk, byte for byte. Non-2xx responses become errors
 * whose `name` is the server-side exception class.
 */

import { read_container, write_container, TensorRecord } from "./container.js";
import { PipelineConfig, configToQuery } from "./config.js";
import { ConfigError, ServiceError } from "./errors.js";

export interface ClientOptions {
  /** Service origin; defaults to $WAVELET_PREP_URL or localhost:8000. */
  baseUrl?: string;
  /** Source sample depth for integer image arrays ("8" or "16"). */
  bit_depth?: "8" | "16";
}

export interface ImageArray {
  /** Row-major samples; integer inputs are sent as int32. */
  data: Int32Array | Float32Array | Uint8Array | Uint16Array;
  /** [height, width] or [channels, height, width]. */
  dims: number[];
}

function baseUrl(options?: ClientOptions): string {
  return (
    options?.baseUrl ??
    (typeof process !== "undefined" ? process.env.WAVELET_PREP_URL : undefined) ??
    "http://127.0.0.1:8000"
  );
}

function asWire(image: ImageArray): Int32Array | Float32Array {
  if (image.data instanceof Int32Array || image.data instanceof Float32Array) {
    return image.data;
  }
  return Int32Array.from(image.data);
}

async function post(
  path: string,
  params: URLSearchParams,
  body: Uint8Array,
  options?: ClientOptions,
): Promise<TensorRecord[]> {
  const url = `${baseUrl(options)}${path}?${params.toString()}`;
  const response = await fetch(url, {
    method: "POST",
    headers: { "content-type": "application/octet-stream" },
    body: body as unknown as BodyInit,
  });
  if (!response.ok) {
    let name = "ServiceError";
    let detail = `HTTP ${response.status}`;
    try {
      const payload = (await response.json()) as { error?: string; detail?: string };
      name = payload.error ?? name;
      detail = payload.detail ?? detail;
    } catch {
      // non-JSON error body; keep the generic name
    }
    throw new ServiceError(name, detail, response.status);
  }
  return read_container(new Uint8Array(await response.arrayBuffer()));
}

/**
 * Full preprocessing pipeline on an image array.
 *
 * Returns the packed tensors (one for levels=1). Bit-identical to the
 * CLI's .wvt output for the same input and config in reversible mode.
 */
export async function preprocess(
  image: ImageArray,
  config: PipelineConfig,
  options?: ClientOptions,
): Promise<TensorRecord[]> {
  const params = configToQuery(config);
  if (options?.bit_depth) params.set("bit_depth", options.bit_depth);
  const body = write_container([{ data: asWire(image), dims: image.dims }]);
  return post("/v1/preprocess", params, body, options);
}

/** Plain bilinear downsample to (W, H); no subband decomposition. */
export async function preprocess_baseline(
  image: ImageArray,
  config: PipelineConfig,
  options?: ClientOptions,
): Promise<TensorRecord[]> {
  const params = configToQuery(config);
  params.set("baseline", "true");
  if (options?.bit_depth) params.set("bit_depth", options.bit_depth);
  const body = write_container([{ data: asWire(image), dims: image.dims }]);
  return post("/v1/preprocess", params, body, options);
}

export interface TransformOptions extends ClientOptions {
  mode?: "float" | "reversible";
  scaling_convention?: "paper" | "jpeg2000";
}

function transformParams(options?: TransformOptions): URLSearchParams {
  const params = new URLSearchParams();
  if (options?.mode) params.set("mode", options.mode);
  if (options?.scaling_convention) params.set("scaling_convention", options.scaling_convention);
  return params;
}

/** One decomposition level; returns LL, HL, LH, HH records in order. */
export async function forward2d(
  plane: ImageArray,
  options?: TransformOptions,
): Promise<TensorRecord[]> {
  if (plane.dims.length !== 2) {
    throw new ConfigError("forward2d expects a 2D plane");
  }
  const body = write_container([{ data: asWire(plane), dims: plane.dims }]);
  return post("/v1/forward2d", transformParams(options), body, options);
}

/** Invert forward2d; accepts the four subband records it returned. */
export async function inverse2d(
  subbands: TensorRecord[],
  options?: TransformOptions,
): Promise<TensorRecord> {
  if (subbands.length !== 4) {
    throw new ConfigError(`inverse2d expects four subband tensors, got ${subbands.length}`);
  }
  const body = write_container(subbands);
  const records = await post("/v1/inverse2d", transformParams(options), body, options);
  return records[0];
}

export interface HealthInfo {
  status: string;
  name: string;
  version: string;
}

export async function health(options?: ClientOptions): Promise<HealthInfo> {
  const response = await fetch(`${baseUrl(options)}/health`);
  if (!response.ok) {
    throw new ServiceError("ServiceError", `HTTP ${response.status}`, response.status);
  }
  return (await response.json()) as HealthInfo;
}
