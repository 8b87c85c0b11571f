import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["tests/**/*.test.ts"],
    // the operator-loop integration test overrides this per test
    testTimeout: 20_000,
    hookTimeout: 60_000,
  },
});
