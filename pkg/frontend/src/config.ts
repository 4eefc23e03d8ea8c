import { ConfigError } from "./errors.js";

/** Mirrors the service's PipelineConfig field names one-to-one. */
export interface PipelineConfig {
  network_input_dims: [number, number];
  mode?: "float" | "reversible";
  levels?: number;
  channel_mask?: string | string[];
  normalization?: "raw" | "unit_interval" | "per_channel_affine";
  color_policy?: "grayscale_single_plane" | "per_channel_fanout";
  scaling_convention?: "paper" | "jpeg2000";
}

const CONFIG_KEYS = new Set([
  "network_input_dims",
  "mode",
  "levels",
  "channel_mask",
  "normalization",
  "color_policy",
  "scaling_convention",
]);

/** Validate a config and flatten it into service query parameters. */
export function configToQuery(config: PipelineConfig): URLSearchParams {
  for (const key of Object.keys(config)) {
    if (!CONFIG_KEYS.has(key)) {
      throw new ConfigError(`unknown config key "${key}"`);
    }
  }
  const dims = config.network_input_dims;
  if (!Array.isArray(dims) || dims.length !== 2) {
    throw new ConfigError("config requires network_input_dims as [width, height]");
  }
  const params = new URLSearchParams();
  params.set("width", String(dims[0]));
  params.set("height", String(dims[1]));
  if (config.mode !== undefined) params.set("mode", config.mode);
  if (config.levels !== undefined) params.set("levels", String(config.levels));
  if (config.channel_mask !== undefined) {
    const mask = Array.isArray(config.channel_mask)
      ? config.channel_mask.join(",")
      : config.channel_mask;
    params.set("channel_mask", mask);
  }
  if (config.normalization !== undefined) params.set("normalization", config.normalization);
  if (config.color_policy !== undefined) params.set("color_policy", config.color_policy);
  if (config.scaling_convention !== undefined) {
    params.set("scaling_convention", config.scaling_convention);
  }
  return params;
}
