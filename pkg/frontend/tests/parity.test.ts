/**
 * Cross-boundary parity harness.
 *
 * Spins up the Python service, generates 100 deterministic random images,
 * runs the real CLI on them, and checks that tensors fetched through this
 * client are bit-identical to the .wvt containers the CLI wrote. Also
 * checks that error class names survive the HTTP boundary.
 */

import { ChildProcess, spawn, spawnSync } from "node:child_process";
import { mkdtempSync, readFileSync, readdirSync, rmSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import {
  ConfigError,
  ServiceError,
  forward2d,
  health,
  inverse2d,
  preprocess,
  preprocess_baseline,
  read_container,
  write_container,
} from "../src/index.js";
import { encodePgm, mulberry32, randomInt, sameBytes } from "./helpers.js";

const PYTHON = process.env.WAVELET_PREP_PYTHON ?? "python3";
const PORT = 18000 + (process.pid % 2000);
const BASE = { baseUrl: `http://127.0.0.1:${PORT}` };
const NETWORK: [number, number] = [12, 12];
const IMAGE_COUNT = 100;

interface Fixture {
  name: string;
  width: number;
  height: number;
  bitDepth: "8" | "16";
  samples: Uint16Array;
}

let service: ChildProcess;
let imageDir: string;
let containerDir: string;
const fixtures: Fixture[] = [];

function makeFixtures(): void {
  const rand = mulberry32(0x77a7);
  for (let i = 0; i < IMAGE_COUNT; i++) {
    const width = 20 + randomInt(rand, 41);
    const height = 20 + randomInt(rand, 41);
    const bitDepth = i % 3 === 0 ? "16" : "8";
    const top = bitDepth === "16" ? 65536 : 256;
    const samples = Uint16Array.from({ length: width * height }, () => randomInt(rand, top));
    fixtures.push({ name: `img${String(i).padStart(3, "0")}`, width, height, bitDepth, samples });
  }
}

async function waitForService(): Promise<void> {
  const deadline = Date.now() + 30_000;
  for (;;) {
    try {
      const info = await health(BASE);
      if (info.status === "ok") return;
    } catch {
      // not up yet
    }
    if (Date.now() > deadline) {
      throw new Error("wavelet-prep service did not come up within 30s");
    }
    await new Promise((resolve) => setTimeout(resolve, 250));
  }
}

beforeAll(async () => {
  makeFixtures();
  imageDir = mkdtempSync(join(tmpdir(), "wvlt-img-"));
  containerDir = mkdtempSync(join(tmpdir(), "wvlt-out-"));
  for (const f of fixtures) {
    const maxval = f.bitDepth === "16" ? 65535 : 255;
    writeFileSync(join(imageDir, `${f.name}.pgm`), encodePgm(f.samples, f.width, f.height, maxval));
  }

  const cli = spawnSync(
    PYTHON,
    [
      "-m",
      "wavelet_prep.cli",
      "pipeline",
      "--input",
      imageDir,
      "--output",
      containerDir,
      "--size",
      `${NETWORK[0]}x${NETWORK[1]}`,
      "--mode",
      "reversible",
    ],
    { encoding: "utf-8" },
  );
  if (cli.status !== 0) {
    throw new Error(`CLI pipeline failed (${cli.status}): ${cli.stderr}`);
  }

  service = spawn(PYTHON, ["-m", "wavelet_prep.service", "--port", String(PORT)], {
    stdio: ["ignore", "ignore", "pipe"],
  });
  await waitForService();
}, 90_000);

afterAll(() => {
  service?.kill();
  rmSync(imageDir, { recursive: true, force: true });
  rmSync(containerDir, { recursive: true, force: true });
});

describe("reversible-mode parity with CLI-written containers", () => {
  it(`matches all ${IMAGE_COUNT} tensors bit for bit`, async () => {
    const written = readdirSync(containerDir).filter((f) => f.endsWith(".wvt"));
    expect(written.length).toBe(IMAGE_COUNT);

    for (const f of fixtures) {
      const cliRecords = read_container(readFileSync(join(containerDir, `${f.name}.wvt`)));
      expect(cliRecords.length).toBe(1);

      const served = await preprocess(
        { data: f.samples, dims: [f.height, f.width] },
        { network_input_dims: NETWORK, mode: "reversible" },
        { ...BASE, bit_depth: f.bitDepth },
      );
      expect(served.length).toBe(1);
      expect(served[0].dims).toEqual(cliRecords[0].dims);
      expect(served[0].dtype).toBe("int32");
      expect(sameBytes(served[0].data, cliRecords[0].data)).toBe(true);
      for (const key of ["mask", "mode", "levels", "convention", "normalization", "source_max"]) {
        expect(served[0].metadata[key]).toBe(cliRecords[0].metadata[key]);
      }
    }
  }, 120_000);

  it("re-encodes CLI containers byte-identically", () => {
    for (const f of fixtures.slice(0, 10)) {
      const raw = new Uint8Array(readFileSync(join(containerDir, `${f.name}.wvt`)));
      expect(write_container(read_container(raw))).toEqual(raw);
    }
  });
});

describe("transform endpoints", () => {
  it("forward2d then inverse2d is bit-exact", async () => {
    const rand = mulberry32(0x1234);
    const plane = {
      data: Int32Array.from({ length: 32 * 48 }, () => randomInt(rand, 65536)),
      dims: [32, 48],
    };
    const subbands = await forward2d(plane, { ...BASE, mode: "reversible" });
    expect(subbands.map((s) => s.metadata.subband)).toEqual(["LL", "HL", "LH", "HH"]);
    expect(subbands[0].dims).toEqual([16, 24]);
    const restored = await inverse2d(subbands, { ...BASE, mode: "reversible" });
    expect(restored.dims).toEqual([32, 48]);
    expect(sameBytes(restored.data, plane.data)).toBe(true);
  });

  it("baseline returns a single downsampled channel", async () => {
    const f = fixtures[0];
    const records = await preprocess_baseline(
      { data: f.samples, dims: [f.height, f.width] },
      { network_input_dims: NETWORK, mode: "reversible" },
      { ...BASE, bit_depth: f.bitDepth },
    );
    expect(records[0].dims).toEqual([1, NETWORK[1], NETWORK[0]]);
    expect(records[0].metadata.kind).toBe("baseline");
  });

  it("handles concurrent requests on distinct arrays", async () => {
    const results = await Promise.all(
      fixtures.slice(0, 8).map((f) =>
        preprocess(
          { data: f.samples, dims: [f.height, f.width] },
          { network_input_dims: NETWORK, mode: "reversible" },
          { ...BASE, bit_depth: f.bitDepth },
        ),
      ),
    );
    results.forEach((records, i) => {
      const cli = read_container(readFileSync(join(containerDir, `${fixtures[i].name}.wvt`)));
      expect(sameBytes(records[0].data, cli[0].data)).toBe(true);
    });
  });
});

describe("error names round-trip across the boundary", () => {
  const plane = { data: Int32Array.from([1, 2, 3, 4]), dims: [2, 2] };

  it("rejects unknown config keys locally, naming the key", async () => {
    const config = { network_input_dims: NETWORK, densify: true } as never;
    await expect(preprocess(plane, config, BASE)).rejects.toThrow(/densify/);
    await expect(preprocess(plane, config, BASE)).rejects.toHaveProperty("name", "ConfigError");
    expect(() => new ConfigError("x")).not.toThrow();
  });

  it("surfaces ConfigError from the service", async () => {
    await expect(
      preprocess(plane, { network_input_dims: [0, 12] }, BASE),
    ).rejects.toHaveProperty("name", "ConfigError");
  });

  it("surfaces OddDimensionError from the service", async () => {
    const odd = { data: Int32Array.from({ length: 7 * 8 }, (_, i) => i), dims: [7, 8] };
    await expect(forward2d(odd, { ...BASE, mode: "reversible" })).rejects.toHaveProperty(
      "name",
      "OddDimensionError",
    );
  });

  it("surfaces CorruptContainer and VersionMismatch from the service", async () => {
    const good = write_container([{ data: plane.data, dims: plane.dims }]);
    const url = `${BASE.baseUrl}/v1/preprocess?width=12&height=12`;

    const truncated = await fetch(url, { method: "POST", body: good.subarray(0, 9) as never });
    expect(truncated.status).toBe(400);
    expect(((await truncated.json()) as { error: string }).error).toBe("CorruptContainer");

    const stale = good.slice();
    stale[4] = 9;
    const versioned = await fetch(url, { method: "POST", body: stale as never });
    expect(((await versioned.json()) as { error: string }).error).toBe("VersionMismatch");
  });

  it("carries status and detail on ServiceError", async () => {
    try {
      await preprocess(plane, { network_input_dims: [0, 12] }, BASE);
      expect.unreachable("preprocess should have thrown");
    } catch (error) {
      const serviceError = error as ServiceError;
      expect(serviceError).toBeInstanceOf(ServiceError);
      expect(serviceError.status).toBe(400);
      expect(serviceError.message).toMatch(/network_input_dims/);
    }
  });
});
