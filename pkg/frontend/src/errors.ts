/** Container bytes are structurally invalid. */
export class CorruptContainer extends Error {
  constructor(message: string) {
    super(message);
    this.name = "CorruptContainer";
  }
}

/** Container declares an unsupported format version. */
export class VersionMismatch extends CorruptContainer {
  constructor(message: string) {
    super(message);
    this.name = "VersionMismatch";
  }
}

/** Invalid configuration detected before any request is sent. */
export class ConfigError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "ConfigError";
  }
}

/**
 * A non-2xx response from the service. `name` carries the server-side
 * exception class (e.g. "OddDimensionError"), so callers can match on it
 * exactly as they would against the core library.
 */
export class ServiceError extends Error {
  readonly status: number;

  constructor(name: string, detail: string, status: number) {
    super(`${name}: ${detail}`);
    this.name = name || "ServiceError";
    this.status = status;
  }
}
