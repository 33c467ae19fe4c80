import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    environment: "node",
    globalSetup: "./tests/globalSetup.ts",
    include: ["tests/**/*.test.ts"],
    testTimeout: 30000,
    hookTimeout: 240000,
  },
});
