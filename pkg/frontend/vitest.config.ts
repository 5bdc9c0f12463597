import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    environment: "happy-dom",
    include: ["tests/**/*.test.ts"],
    // live-service tests spawn a uvicorn process and play full games
    testTimeout: 120_000,
    hookTimeout: 120_000,
    // each live-service file binds its own port; keep files sequential so
    // a slow machine does not stack several service processes
    fileParallelism: false,
  },
});
