import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["tests/**/*.test.ts"],
    testTimeout: 120_000,
    hookTimeout: 90_000,
    // the parity suite owns one shared service process
    fileParallelism: false,
  },
});
