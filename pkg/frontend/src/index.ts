export { read_container, write_container } from "./container.js";
export type { TensorRecord, WireDtype, WritableTensor } from "./container.js";
export { configToQuery } from "./config.js";
export type { PipelineConfig } from "./config.js";
export {
  forward2d,
  health,
  inverse2d,
  preprocess,
  preprocess_baseline,
} from "./client.js";
export type { ClientOptions, HealthInfo, ImageArray, TransformOptions } from "./client.js";
export { ConfigError, CorruptContainer, ServiceError, VersionMismatch } from "./errors.js";
