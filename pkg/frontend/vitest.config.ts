import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    environment: "jsdom",
    globalSetup: ["tests/setup/fixtureServer.ts"],
    testTimeout: 30_000,
    hookTimeout: 60_000,
  },
});
