import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    // every assertion spawns the real CLI, so give the suite room
    testTimeout: 180_000,
    hookTimeout: 60_000,
  },
});
